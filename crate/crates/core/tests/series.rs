use brjuno::cf::{iota, CfAlgorithm};
use brjuno::figures::fibonacci_ratio;
use brjuno::golden::G;
use brjuno::rational::{rat, Rational};
use brjuno::sampling::Sampler;
use brjuno::series::{
    brjuno, digit_class_sums, functional_residual, logq_sum, parity_parts, rcf_parity_split, SeriesParams,
};

#[test]
fn rcf_value_at_four_elevenths() {
    let b = brjuno(&CfAlgorithm::Rcf, &rat(4, 11), &SeriesParams::new(1.0)).unwrap();
    let hand = (11.0f64 / 4.0).ln() + (4.0 / 11.0) * (4.0f64 / 3.0).ln() + (3.0 / 11.0) * 3f64.ln();
    assert!((b.value - hand).abs() < 1e-12);
    assert!((b.value - 1.41585).abs() < 1e-4);
    assert_eq!(b.terms_used, 3);
    assert!(b.orbit_terminated);
}

#[test]
fn golden_fixed_point() {
    let limit = -G.ln() / (1.0 - G);
    assert!((limit - 1.25982).abs() < 1e-5);
    let mut prev = f64::INFINITY;
    for n in [10, 20, 40, 80] {
        let v = brjuno(&CfAlgorithm::Rcf, &fibonacci_ratio(n), &SeriesParams::new(1.0)).unwrap().value;
        let gap = (v - limit).abs();
        assert!(gap <= prev + 1e-12, "n={n}: {gap} after {prev}");
        prev = gap;
    }
    assert!(prev < 1e-9);
}

#[test]
fn even_map_fixed_point() {
    // Convergents of sqrt(2) - 1 = [0; 2, 2, ...]: p/q with Pell numbers.
    let (mut p, mut q) = (0i64, 1i64);
    let (mut pp, mut qp) = (1i64, 0i64);
    for _ in 0..30 {
        (p, pp) = (2 * p + pp, p);
        (q, qp) = (2 * q + qp, q);
    }
    let x = rat(p, q);
    let r2 = std::f64::consts::SQRT_2;
    let limit = (1.0 + r2).ln() / (2.0 - r2);
    let b = brjuno(&CfAlgorithm::Ecf, &x, &SeriesParams::new(1.0)).unwrap();
    assert!((b.value - limit).abs() < 1e-9, "{} vs {limit}", b.value);
}

#[test]
fn log_denominator_sums() {
    let r = logq_sum(&CfAlgorithm::Rcf, &rat(4, 11), 1.0, 3).unwrap();
    let hand = 2f64.ln() + 3f64.ln() / 2.0 + 11f64.ln() / 3.0;
    assert!((r.value - hand).abs() < 1e-12 && (r.value - 2.0417).abs() < 1e-4);
    let o = logq_sum(&CfAlgorithm::Ocf, &rat(4, 11), 1.0, 3).unwrap();
    // From q = 1, 3, 8, 11; the sum is 2.0915 to four places.
    let hand = 3f64.ln() + 8f64.ln() / 3.0 + 11f64.ln() / 8.0;
    assert!((o.value - hand).abs() < 1e-12 && (o.value - 2.0915).abs() < 1e-4);
    assert_eq!(logq_sum(&CfAlgorithm::Rcf, &rat(4, 11), 1.0, 0).unwrap().value, 0.0);
}

#[test]
fn odd_odd_is_even_conjugate() {
    let s = Sampler::new(5, 96, 20).draw_many(40).unwrap().points;
    for x in &s {
        for nu in [0.5, 1.0, 2.0] {
            let p = SeriesParams::fixed(nu, 40);
            let boo = brjuno(&CfAlgorithm::Oocf, x, &p).unwrap().value;
            let be = brjuno(&CfAlgorithm::Ecf, &iota(x).unwrap(), &p).unwrap().value;
            let rhs = (x + Rational::one()).powf(nu) * be;
            assert!((boo - rhs).abs() <= 1e-9 * boo.abs(), "x={x} nu={nu}: {boo} vs {rhs}");
        }
    }
}

#[test]
fn functional_equations_hold_at_aligned_depth() {
    let s = Sampler::new(9, 128, 24).draw_many(30).unwrap().points;
    for alg in [CfAlgorithm::Rcf, CfAlgorithm::bcf(), CfAlgorithm::Ocf, CfAlgorithm::nicf()] {
        for x in &s {
            let r = functional_residual(&alg, x, &SeriesParams::new(1.0)).unwrap();
            let b = brjuno(&alg, x, &SeriesParams::new(1.0)).unwrap().value;
            assert!(r.abs() <= 1e-12 * (1.0 + b.abs()), "{alg} x={x}: {r}");
        }
    }
}

#[test]
fn parity_split_partitions_the_sum() {
    let half = rat(1, 2);
    let s = Sampler::new(2, 96, 16).draw_many(30).unwrap().points;
    for x in s.iter().map(|x| x * &half) {
        let x = &x;
        let params = SeriesParams::new(1.0);
        let split = rcf_parity_split(x, &params).unwrap();
        assert!((split.inf_rational + split.one_rational - split.total).abs() <= 1e-12 * split.total.abs().max(1.0));
        let parts = parity_parts(x, &params).unwrap();
        assert!(parts.residual_even.abs() < 1e-8 && parts.residual_odd.abs() < 1e-8, "{x}: {parts:?}");
    }
}

#[test]
fn all_twos_have_no_star_star_terms() {
    // [0; 2, 2, ..., 2] in the even expansion.
    let mut x = rat(1, 2);
    for _ in 0..20 {
        x = (rat(2, 1) + x).recip().unwrap();
    }
    let c = digit_class_sums(&CfAlgorithm::Ecf, &x, &SeriesParams::new(1.0)).unwrap();
    assert_eq!(c.star_star, 0.0);
}

#[test]
fn star_sums_stay_below_three() {
    for x in Sampler::new(3, 64, 8).draw_many(1000).unwrap().points {
        let c = digit_class_sums(&CfAlgorithm::Ecf, &x, &SeriesParams::new(1.0)).unwrap();
        assert!(c.star < 3.0, "x={x}: {}", c.star);
    }
}
