use brjuno::cf::{convergents, expand, iota, step, CfAlgorithm, Epsilon};
use brjuno::golden;
use brjuno::rational::Rational;
use brjuno::regularity::{phi_closed, phi_def};
use brjuno::sampling::Sampler;
use brjuno::series::{brjuno, brjuno_multi, SeriesParams};
use brjuno::table::fmt_f64;
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

/// A reduced fraction strictly inside (0, 1).
fn unit_rational() -> impl Strategy<Value = Rational> {
    (2u64..1 << 48).prop_flat_map(|d| (1..d).prop_map(move |n| Rational::new(n, d).unwrap()))
}

fn algorithms() -> Vec<CfAlgorithm> {
    vec![
        CfAlgorithm::Rcf,
        CfAlgorithm::bcf(),
        CfAlgorithm::nicf(),
        CfAlgorithm::alpha(Rational::new(2, 3).unwrap()).unwrap(),
        CfAlgorithm::Ocf,
        CfAlgorithm::Ecf,
        CfAlgorithm::Oocf,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convergents_close_on_the_input(x in unit_rational()) {
        for alg in algorithms() {
            let Ok(orbit) = expand(&alg, &x, 10_000) else { continue };
            let c = convergents(&orbit);
            for n in 0..=c.len() {
                let lin = (&c.x0 * Rational::from_integer(c.q[n].clone()) - Rational::from_integer(c.p[n].clone())).abs();
                prop_assert_eq!(&lin, &c.beta[n]);
                // |det_n| = |eps_1 ... eps_{n-1}| |det_0|, zero after a terminal digit.
                let prefix = if n == 0 { 1 } else { c.epsilon_prefix[n - 1].abs() };
                prop_assert_eq!(c.det(n).abs(), c.det_expected_abs().abs() * BigInt::from(prefix));
            }
            if orbit.terminated && !orbit.absorbed {
                prop_assert!(c.beta[c.len()].is_zero(), "{} at {}", alg, x);
            }
        }
    }

    #[test]
    fn odd_beta_is_below_golden_powers(x in unit_rational()) {
        let c = convergents(&expand(&CfAlgorithm::Ocf, &x, 10_000).unwrap());
        let (g, g_hi) = (golden::g_lo(), golden::g_hi());
        let mut gp = Rational::one();
        for n in 1..=c.len() {
            gp = gp * &g;
            prop_assert!(c.beta[n] <= gp);
            // Not monotone: a final (1, T) digit after eps = -1 lowers q.
            prop_assert!(Rational::from_integer(c.q[n].clone()) > &g_hi * Rational::from_integer(c.q[n - 1].clone()));
        }
    }

    #[test]
    fn iota_is_an_involution(x in unit_rational()) {
        prop_assert_eq!(iota(&iota(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn backward_and_gauss_maps_sum_to_one(x in unit_rational()) {
        prop_assume!(!x.recip().unwrap().is_integer());
        let a0 = step(&CfAlgorithm::bcf(), &x).unwrap().0;
        let g = step(&CfAlgorithm::Rcf, &x).unwrap().0;
        prop_assert_eq!(a0 + g, Rational::one());
    }

    #[test]
    fn digits_have_admissible_signs(x in unit_rational()) {
        for alg in algorithms() {
            let Ok(orbit) = expand(&alg, &x, 10_000) else { continue };
            let last = orbit.digits.len() - 1;
            for (i, d) in orbit.digits.iter().enumerate() {
                prop_assert!(d.a_u64() >= 1);
                prop_assert_eq!(d.epsilon == Epsilon::Terminal, i == last && orbit.terminated && !orbit.absorbed);
            }
        }
    }

    #[test]
    fn parse_display_round_trip(n in any::<i64>(), d in 1i64..i64::MAX) {
        let x = Rational::new(n, d).unwrap();
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn sampler_is_indexed_not_sequential(seed in any::<u64>(), i in 0u64..64) {
        let s = Sampler::new(seed, 64, 6);
        let batch = s.draw_range(i, 3).unwrap().points;
        prop_assert_eq!(&batch[0], &s.draw(i).unwrap().0);
        prop_assert_eq!(&batch[2], &s.draw(i + 2).unwrap().0);
    }

    #[test]
    fn shared_orbit_series_agree(x in unit_rational()) {
        let nus = [0.5, 1.0, 2.0];
        let Ok(multi) = brjuno_multi(&CfAlgorithm::Ocf, &x, &nus, &SeriesParams::default()) else { return Ok(()) };
        for (nu, m) in nus.iter().zip(multi) {
            let single = brjuno(&CfAlgorithm::Ocf, &x, &SeriesParams::new(*nu)).unwrap();
            prop_assert!((single.value - m.value).abs() <= 1e-12 * single.value.abs().max(1.0));
            prop_assert!(single.value >= 0.0);
        }
    }

    #[test]
    fn phi_closed_form_matches_its_definition(x in unit_rational(), nu in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        let x = x * Rational::new(1, 2).unwrap();
        let c = phi_closed(&x, nu).unwrap();
        let d = phi_def(&x, nu, &SeriesParams::new(nu)).unwrap();
        prop_assert!((c - d).abs() <= 1e-6, "x={} nu={}: {} vs {}", x, nu, c, d);
    }
}
