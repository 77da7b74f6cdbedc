use brjuno::cf::{convergents, expand, CfAlgorithm};
use brjuno::error::Error;
use brjuno::golden::{self, G};
use brjuno::operators::{
    apply_t_iter, apply_t_iter_fn, holder_norm_sequence, lp_norm, neumann_sum, spectral_estimate, GridFunction, Measure,
    PairSchedule,
};
use brjuno::rational::rat;
use brjuno::sampling::Sampler;
use brjuno::series::{brjuno, SeriesParams};

fn one() -> GridFunction {
    GridFunction::constant(1.0).unwrap()
}

#[test]
fn zeroth_iterate_is_the_function() {
    let f = GridFunction::uniform(64, |x| x * x).unwrap();
    let x = rat(3, 7);
    assert_eq!(apply_t_iter(&CfAlgorithm::Ocf, 1.0, &f, &x, 0).unwrap(), f.eval_rational(&x));
}

#[test]
fn iterates_of_one_are_beta_powers() {
    for x in Sampler::new(21, 128, 24).draw_many(20).unwrap().points {
        for alg in [CfAlgorithm::Ocf, CfAlgorithm::Rcf, CfAlgorithm::nicf()] {
            let x = &x * &alg.upper();
            let c = convergents(&expand(&alg, &x, 64).unwrap());
            for n in 1..12 {
                let t = apply_t_iter_fn(&alg, 1.5, |_| Ok(1.0), &x, n).unwrap();
                let b = c.beta[n - 1].to_f64().powf(1.5);
                assert!((t - b).abs() <= 1e-12 * b, "{alg} x={x} n={n}: {t} vs {b}");
            }
        }
    }
}

#[test]
fn odd_iterates_decay_like_golden_powers() {
    let g9 = golden::g_lo().to_f64().powi(9);
    for x in Sampler::new(22, 96, 16).draw_many(50).unwrap().points {
        let t = apply_t_iter(&CfAlgorithm::Ocf, 1.0, &one(), &x, 10).unwrap();
        assert!(t <= g9, "x={x}: {t}");
    }
}

#[test]
fn measures() {
    assert!((lp_norm(&one(), 1.0, &Measure::Mo, 10).unwrap().value - 1.0).abs() < 1e-6);
    assert!(matches!(lp_norm(&one(), 1.0, &Measure::Me { delta: None }, 8), Err(Error::DivergentIntegral(_))));
    let zero = GridFunction::constant(0.0).unwrap();
    assert_eq!(lp_norm(&zero, 2.0, &Measure::Lebesgue, 8).unwrap().value, 0.0);
}

#[test]
fn spectral_estimates() {
    let s = spectral_estimate(&CfAlgorithm::Ocf, 1.0, &one(), 20, 2.0).unwrap();
    assert!(s.value <= G + 0.05, "{}", s.value);
    let s0 = spectral_estimate(&CfAlgorithm::Ocf, 0.0, &one(), 20, 2.0).unwrap();
    assert!((s0.value - 1.0).abs() < 1e-3, "{}", s0.value);
    let nicf = spectral_estimate(&CfAlgorithm::nicf(), 1.0, &one(), 20, 2.0).unwrap();
    assert!(nicf.value < 1.0);
}

#[test]
fn neumann_series_reproduces_the_odd_brjuno_function() {
    let f = GridFunction::neg_log(64).unwrap();
    for x in Sampler::new(23, 64, 12).draw_many(10).unwrap().points {
        let s = neumann_sum(&CfAlgorithm::Ocf, 1.0, &f, &x, 40).unwrap();
        let b = brjuno(&CfAlgorithm::Ocf, &x, &SeriesParams::fixed(1.0, 41)).unwrap().value;
        assert!((s.value - b).abs() <= 1e-9 + s.interpolation_bound, "x={x}: {} vs {b}", s.value);
    }
    let x = rat(5, 13);
    assert_eq!(neumann_sum(&CfAlgorithm::Ocf, 1.0, &f, &x, 0).unwrap().value, f.eval_rational(&x));
}

#[test]
fn neumann_series_of_one_is_geometrically_bounded() {
    for x in Sampler::new(24, 96, 16).draw_many(30).unwrap().points {
        let s = neumann_sum(&CfAlgorithm::Ocf, 1.0, &one(), &x, 60).unwrap();
        // beta_{-1} + beta_0 + sum_{m>=1} g^m.
        assert!(s.value <= 2.0 + G / (1.0 - G), "x={x}: {}", s.value);
        assert!(s.tail_bound.unwrap() >= 0.0);
    }
}

#[test]
fn holder_norms_do_not_grow() {
    let f = GridFunction::neg_log(64).unwrap();
    let schedule = PairSchedule { samples_per_scale: 16, ..PairSchedule::default() };
    let seq = holder_norm_sequence(&CfAlgorithm::Ocf, 1.0, &f, 15, 0.5, &schedule).unwrap();
    assert_eq!(seq.len(), 16);
    let norms: Vec<f64> = seq[1..].iter().map(|h| h.norm).collect();
    assert!(norms.windows(2).any(|w| w[1] <= w[0]));
    assert!(norms[14] < norms.iter().cloned().fold(0.0, f64::max));
}

#[test]
fn unsupported_algorithms_are_rejected() {
    assert!(matches!(apply_t_iter(&CfAlgorithm::Ecf, 1.0, &one(), &rat(1, 3), 2), Err(Error::Domain(_))));
    assert!(matches!(apply_t_iter(&CfAlgorithm::Ocf, -1.0, &one(), &rat(1, 3), 2), Err(Error::InvalidNu(_))));
}
