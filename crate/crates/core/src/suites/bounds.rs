//! Golden-ratio bounds of the odd expansion and ECF monotonicity, compared
//! exactly against the rational bracket of `g` at its unfavourable end.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

use super::{single, SuiteConfig, SuiteName, SuiteReport, Tallies};
use crate::cf::{convergents, expand, CfAlgorithm, ConvergentSeq, Epsilon};
use crate::error::Result;
use crate::golden;
use crate::rational::Rational;
use crate::regularity::branch;
use crate::sampling::Sampler;

pub const DEFAULT_SEED: u64 = 11;
pub const DEFAULT_DENOM_BITS: u32 = 160;
pub const DEFAULT_DEPTH: usize = 40;
/// Orbit steps required across all samples.
pub const MIN_STEPS: usize = 10_000;
const EXPANSION_CAP: usize = 4096;
const BATCH: usize = 32;
/// Samples whose first branches are also rebuilt through [`branch`].
const BRANCH_SAMPLES: u64 = 16;
const BRANCH_DEPTH: usize = 24;

struct Bracket {
    g_lo: Rational,
    g_hi: Rational,
    /// `1/g_lo - 2`, the largest candidate for `1/g - 2`.
    q1: Rational,
    /// `1 - g_lo`, the largest candidate for `1 - g`.
    one_minus_g: Rational,
    /// `1/g_hi`, the smallest candidate for `1/g`.
    inv_g: Rational,
}

impl Bracket {
    fn new() -> Result<Self> {
        let (g_lo, g_hi) = (golden::g_lo(), golden::g_hi());
        Ok(Bracket {
            q1: g_lo.recip()? - Rational::from_integer(2),
            one_minus_g: Rational::one() - &g_lo,
            inv_g: g_hi.recip()?,
            g_lo,
            g_hi,
        })
    }
}

fn int(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

fn ocf_checks(t: &mut Tallies, idx: u64, c: &ConvergentSeq, b: &Bracket) {
    let len = c.len();
    let at = |n: usize| format!("sample {idx}, n = {n}");
    let eps = |n: usize| c.digits[n - 1].epsilon;

    // eps_n q_{n-1} / q_n > 1/g - 2.
    let t1 = t.get("q-ratio-lower");
    for n in 1..=len {
        let lhs = Rational::from_integer(eps(n).as_i32()) * int(&c.q[n - 1]) / int(&c.q[n]);
        t1.record(lhs > b.q1, || at(n));
    }
    // q_n > g q_{n-1}.
    let t2 = t.get("q-growth");
    for n in 1..=len {
        t2.record(int(&c.q[n]) > &b.g_hi * int(&c.q[n - 1]), || at(n));
    }
    // 1 - g <= beta_n q_{n+1} <= 1/g.
    let t3 = t.get("beta-q-bracket");
    for n in 0..len {
        let v = &c.beta[n] * int(&c.q[n + 1]);
        t3.record(b.one_minus_g <= v && v <= b.inv_g, || at(n));
    }
    // beta_n <= g^n for n >= 1.
    let t4 = t.get("beta-golden-decay");
    let mut gpow = Rational::one();
    for n in 1..=len {
        gpow = gpow * &b.g_lo;
        t4.record(c.beta[n] <= gpow, || at(n));
    }
    // Branches of A_o^m: (1-g)/q_m^2 <= |J| <= 1/(g q_m^2), and
    // g^2 q_m^2 <= |(A_o^m)'(x)| <= q_m^2/(1-g)^2 at the orbit point.
    let g2 = &b.g_hi * &b.g_hi;
    let inv_1mg2 = (&b.one_minus_g * &b.one_minus_g).recip().expect("nonzero");
    let mut results = Vec::new();
    for m in 1..=len {
        if eps(m) == Epsilon::Terminal {
            continue;
        }
        let (qm, qm1) = (int(&c.q[m]), int(&c.q[m - 1]));
        let e = Rational::from_integer(eps(m).as_i32());
        let scaled = &qm / (&qm + &e * &qm1);
        let root = &qm + &e * &qm1 * c.invert(m);
        let deriv = &root * &root;
        let q2 = &qm * &qm;
        results.push((m, b.one_minus_g <= scaled && scaled <= b.inv_g, &g2 * &q2 <= deriv && deriv <= q2 * &inv_1mg2));
    }
    let t5 = t.get("branch-length");
    for &(m, ok, _) in &results {
        t5.record(ok, || at(m));
    }
    let t6 = t.get("branch-derivative");
    for &(m, _, ok) in &results {
        t6.record(ok, || at(m));
    }
}

fn branch_checks(t: &mut Tallies, idx: u64, c: &ConvergentSeq, b: &Bracket) -> Result<()> {
    let tb = t.get("branch-length-direct");
    for m in 0..=BRANCH_DEPTH.min(c.len().saturating_sub(1)) {
        let j = branch(m, &c.x0)?;
        let s = j.scaled_len(&c.q[m]);
        tb.record(j.contains(&c.x0) && b.one_minus_g <= s && s <= b.inv_g, || format!("sample {idx}, m = {m}"));
    }
    Ok(())
}

fn ecf_checks(t: &mut Tallies, idx: u64, c: &ConvergentSeq) {
    let te = t.get("ecf-q-increasing");
    for n in 1..=c.len() {
        te.record(c.q[n] > c.q[n - 1], || format!("sample {idx}, n = {n}"));
    }
}

/// `(tallies, ocf steps, ecf steps)` of one sample.
fn sample_checks(idx: u64, x: &Rational, b: &Bracket) -> Result<(Tallies, usize, usize)> {
    let mut t = Tallies::default();
    let o = convergents(&expand(&CfAlgorithm::Ocf, x, EXPANSION_CAP)?);
    ocf_checks(&mut t, idx, &o, b);
    if idx < BRANCH_SAMPLES {
        branch_checks(&mut t, idx, &o, b)?;
    }
    let e = convergents(&expand(&CfAlgorithm::Ecf, x, EXPANSION_CAP)?);
    ecf_checks(&mut t, idx, &e);
    Ok((t, o.len(), e.len()))
}

pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let sampler = Sampler::new(
        seed,
        config.denom_bits.unwrap_or(DEFAULT_DENOM_BITS),
        config.depth.unwrap_or(DEFAULT_DEPTH),
    );
    let min_samples = config.samples.unwrap_or(0);
    let b = Bracket::new()?;
    let mut all = Tallies::default();
    let (mut ocf_steps, mut ecf_steps, mut drawn) = (0, 0, 0u64);
    // Batches keep the sample set independent of the thread count.
    while ocf_steps < MIN_STEPS || (drawn as usize) < min_samples {
        let batch = sampler.draw_range(drawn, BATCH)?.points;
        let results: Vec<(Tallies, usize, usize)> = batch
            .par_iter()
            .enumerate()
            .map(|(i, x)| sample_checks(drawn + i as u64, x, &b))
            .collect::<Result<_>>()?;
        for (t, o, e) in results {
            all.merge(t);
            ocf_steps += o;
            ecf_steps += e;
        }
        drawn += BATCH as u64;
    }
    let mut checks = all.finish();
    checks.push(single(
        "orbit-steps",
        ocf_steps >= MIN_STEPS,
        true,
        json!({ "ocf_steps": ocf_steps, "ecf_steps": ecf_steps, "samples": drawn, "required": MIN_STEPS }),
    ));
    Ok(SuiteReport::new(SuiteName::Bounds, seed, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn bracket_orders() {
        let b = Bracket::new().unwrap();
        assert!(b.g_lo < b.g_hi);
        assert!(b.q1 < rat(0, 1) && b.q1 > rat(-2, 5));
        assert!(b.one_minus_g < b.inv_g);
    }

    #[test]
    fn fibonacci_ratio_is_near_every_bound() {
        // F_40/F_41 sits on the golden orbit, where the bounds are tightest.
        let (mut a, mut c) = (1i64, 1i64);
        for _ in 0..40 {
            (a, c) = (c, a + c);
        }
        let conv = convergents(&expand(&CfAlgorithm::Ocf, &rat(a, c), 100).unwrap());
        let mut t = Tallies::default();
        ocf_checks(&mut t, 0, &conv, &Bracket::new().unwrap());
        for r in t.finish() {
            assert!(r.passed, "{r:?}");
        }
    }
}
