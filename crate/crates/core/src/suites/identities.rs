//! Exact identities of the expansions: recursions, determinants, `beta`
//! products, inversion, the BCF/Gauss relations and the ECF/OOCF conjugacy.

use num_bigint::{BigInt, Sign};
use num_traits::Signed;
use rayon::prelude::*;

use super::{SuiteConfig, SuiteName, SuiteReport, Tallies};
use crate::cf::{convergents, expand, iota, jump_bcf, step, CfAlgorithm, ConvergentSeq, Digit, Epsilon, Orbit};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::regularity::INDIFFERENT_MAX_TERMS;
use crate::sampling::Sampler;
use crate::series::{brjuno, SeriesParams};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_DENOM_BITS: u32 = 200;
pub const DEFAULT_DEPTH: usize = 40;
/// Orbit steps expanded per algorithm and sample.
const EXPANSION_CAP: usize = 4096;
/// Terms of the aligned OOCF/ECF comparison.
const ALIGNED_TERMS: usize = 64;
const CONJUGACY_TOL: f64 = 1e-9;
/// Samples that also go through the rational inversion API.
const API_SAMPLES: u64 = 50;

fn algorithms() -> Vec<(String, CfAlgorithm)> {
    let third = CfAlgorithm::alpha(Rational::new(1, 3).expect("nonzero")).expect("in range");
    [CfAlgorithm::Rcf, CfAlgorithm::bcf(), CfAlgorithm::nicf(), third, CfAlgorithm::Ocf, CfAlgorithm::Ecf, CfAlgorithm::Oocf]
        .into_iter()
        .map(|a| (a.to_string(), a))
        .collect()
}

/// Recursion coefficient, re-derived here rather than taken from the engine.
fn coefficient(d: &Digit, alg: &CfAlgorithm) -> BigInt {
    let a = BigInt::from(d.a.clone());
    match (alg, d.epsilon) {
        (CfAlgorithm::Oocf, Epsilon::Minus) => 2 * a - 2,
        (CfAlgorithm::Oocf, _) => 2 * a,
        _ => a,
    }
}

/// `(num, den)` of the tail in the inversion formula: `x_n`, or
/// `iota(x_n) = (d - n)/(d + n)` for OOCF; not necessarily reduced.
fn tail(alg: &CfAlgorithm, y: &Rational) -> (BigInt, BigInt) {
    let (n, d) = (y.numer(), y.denom());
    match alg {
        CfAlgorithm::Oocf => (d - n, d + n),
        _ => (n.clone(), d.clone()),
    }
}

fn orbit_checks(t: &mut Tallies, idx: u64, name: &str, alg: &CfAlgorithm, orbit: &Orbit, c: &ConvergentSeq) {
    let len = c.len();
    let at = |n: usize| format!("sample {idx}, {name}, n = {n}");
    let (xn, xd) = (c.x0.numer(), c.x0.denom());
    // D * (q_n x - p_n) for n = -1..=len, shifted by one.
    let lin: Vec<BigInt> = (-1..=len as isize).map(|n| c.q_at(n) * xn - c.p_at(n) * xd).collect();
    let lin_at = |n: isize| &lin[(n + 1) as usize];

    let rec = t.get(&format!("recursion/{name}"));
    for n in 1..=len {
        let d = &c.digits[n - 1];
        let coef = coefficient(d, alg);
        let prev_eps = if n == 1 { 1 } else { c.digits[n - 2].epsilon.as_i32() };
        let ni = n as isize;
        let p = &coef * c.p_at(ni - 1) + prev_eps * c.p_at(ni - 2);
        let q = &coef * c.q_at(ni - 1) + prev_eps * c.q_at(ni - 2);
        rec.record(p == c.p[n] && q == c.q[n], || at(n));
    }
    if orbit.terminated && !orbit.absorbed {
        rec.record(lin_at(len as isize).sign() == Sign::NoSign, || format!("sample {idx}, {name}: last convergent differs from x"));
    }

    let det = t.get(&format!("det/{name}"));
    let d0 = c.det(0);
    det.record(d0.magnitude() == c.det_expected_abs().magnitude(), || at(0));
    for n in 1..=len {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let expected = BigInt::from(sign * c.epsilon_prefix[n - 1]) * &d0;
        det.record(c.det(n) == expected, || at(n));
    }

    // beta_n = beta_{n-1} * tail_n, with beta_n = |lin_n| / D.
    let beta = t.get(&format!("beta/{name}"));
    for n in 0..=len {
        let (tn, td) = tail(alg, &orbit.points[n]);
        beta.record(lin_at(n as isize).abs() * &td == lin_at(n as isize - 1).abs() * &tn, || at(n));
    }

    // tail_n = -eps_n lin_n / lin_{n-1} and x = (p_n + eps p_{n-1} tail)/(q_n + eps q_{n-1} tail).
    let inv = t.get(&format!("inversion/{name}"));
    for n in 1..=len {
        let (tn, td) = tail(alg, &orbit.points[n]);
        let ni = n as isize;
        let e = c.digits[n - 1].epsilon.as_i32();
        let inverted = -e * lin_at(ni) * &td == lin_at(ni - 1) * &tn;
        let rebuilt = e == 0 || {
            let num = c.p_at(ni) * &td + e * c.p_at(ni - 1) * &tn;
            let den = c.q_at(ni) * &td + e * c.q_at(ni - 1) * &tn;
            num * xd == den * xn
        };
        inv.record(inverted && rebuilt, || at(n));
    }
}

/// `beta` and the inversion through the rational API of [`ConvergentSeq`].
fn api_checks(t: &mut Tallies, idx: u64, name: &str, alg: &CfAlgorithm, orbit: &Orbit, c: &ConvergentSeq) -> Result<()> {
    let api = t.get(&format!("rational-api/{name}"));
    let mut product = c.beta_minus1();
    for n in 0..=c.len() {
        product = product * {
            let (a, b) = tail(alg, &orbit.points[n]);
            Rational::new(a, b)?
        };
        api.record(c.beta[n] == product, || format!("sample {idx}, {name}, beta_{n}"));
    }
    for n in 1..=c.len() {
        let y = match alg {
            CfAlgorithm::Oocf => iota(&orbit.points[n])?,
            _ => orbit.points[n].clone(),
        };
        api.record(c.invert(n) == y && c.reconstruct(n, &y) == c.x0, || format!("sample {idx}, {name}, n = {n}"));
    }
    Ok(())
}

fn bcf_checks(t: &mut Tallies, idx: u64, x: &Rational) -> Result<()> {
    let one = Rational::one();
    let gauss = |y: &Rational| step(&CfAlgorithm::Rcf, y).map(|r| r.0);
    let a0 = |y: &Rational| step(&CfAlgorithm::bcf(), y).map(|r| r.0);

    let sum = t.get("a0-plus-gauss");
    for y in [x.clone(), &one - x] {
        if y.recip()?.is_integer() {
            sum.skip();
            continue;
        }
        sum.record(a0(&y)? + gauss(&y)? == one, || format!("sample {idx}, y = {y}"));
    }

    // 1 - G^2(y) = F_j(1 - y) on (0, 1/2).
    let y = x / Rational::from_integer(2);
    let kn = t.get("kraaikamp-nakada");
    let g1 = gauss(&y)?;
    if g1.is_zero() {
        kn.skip();
        return Ok(());
    }
    let lhs = &one - gauss(&g1)?;
    match jump_bcf(&(&one - &y), INDIFFERENT_MAX_TERMS) {
        Ok((_, fj)) => kn.record(lhs == fj, || format!("sample {idx}, y = {y}")),
        Err(Error::Terminal(_)) => kn.skip(),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn conjugacy_checks(t: &mut Tallies, idx: u64, x: &Rational, oo: &Orbit) -> Result<()> {
    let e = expand(&CfAlgorithm::Ecf, &iota(x)?, EXPANSION_CAP)?;
    let conj = t.get("iota-conjugacy");
    let same_shape = e.points.len() == oo.points.len() && e.terminated == oo.terminated && e.absorbed == oo.absorbed;
    conj.record(same_shape, || format!("sample {idx}: orbit lengths {} vs {}", e.points.len(), oo.points.len()));
    if same_shape {
        for (n, (pe, po)) in e.points.iter().zip(&oo.points).enumerate() {
            let (a, b) = tail(&CfAlgorithm::Oocf, po);
            conj.record(pe.numer() * b == pe.denom() * a, || format!("sample {idx}, n = {n}"));
        }
    }

    let series = t.get("oocf-ecf-series");
    let ix = iota(x)?;
    for nu in [0.5, 1.0, 2.0] {
        let params = SeriesParams::fixed(nu, ALIGNED_TERMS);
        let boo = brjuno(&CfAlgorithm::Oocf, x, &params);
        let be = brjuno(&CfAlgorithm::Ecf, &ix, &params);
        match (boo, be) {
            (Ok(a), Ok(b)) => {
                let rhs = (x + Rational::one()).powf(nu) * b.value;
                let ok = (a.value - rhs).abs() <= CONJUGACY_TOL * a.value.abs().max(rhs.abs());
                series.record(ok, || format!("sample {idx}, nu = {nu}: {} vs {rhs}", a.value));
            }
            (Err(Error::RationalTermination), Err(Error::RationalTermination)) => series.skip(),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Ok(())
}

fn sample_checks(idx: u64, x: &Rational, algs: &[(String, CfAlgorithm)]) -> Result<Tallies> {
    let mut t = Tallies::default();
    let mut oocf = None;
    for (name, alg) in algs {
        let orbit = expand(alg, x, EXPANSION_CAP)?;
        let c = convergents(&orbit);
        orbit_checks(&mut t, idx, name, alg, &orbit, &c);
        if idx < API_SAMPLES {
            api_checks(&mut t, idx, name, alg, &orbit, &c)?;
        }
        if *alg == CfAlgorithm::Oocf {
            oocf = Some(orbit);
        }
    }
    bcf_checks(&mut t, idx, x)?;
    if let Some(oo) = oocf {
        conjugacy_checks(&mut t, idx, x, &oo)?;
    }
    Ok(t)
}

pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let sampler = Sampler::new(
        seed,
        config.denom_bits.unwrap_or(DEFAULT_DENOM_BITS),
        config.depth.unwrap_or(DEFAULT_DEPTH),
    );
    let points = sampler.draw_many(samples)?.points;
    let algs = algorithms();
    let per_sample: Vec<Tallies> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| sample_checks(i as u64, x, &algs))
        .collect::<Result<_>>()?;
    let mut all = Tallies::default();
    for t in per_sample {
        all.merge(t);
    }
    Ok(SuiteReport::new(SuiteName::Identities, seed, all.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let cfg = SuiteConfig { samples: Some(12), denom_bits: Some(96), depth: Some(20), ..SuiteConfig::with_seed(3) };
        let r = run(&cfg).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(r.passed);
        assert!(r.check("det/oocf").unwrap().checked > 12);
    }
}
