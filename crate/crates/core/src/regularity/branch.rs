use num_bigint::BigInt;
use serde::Serialize;

use crate::cf::{convergents, expand, CfAlgorithm, ConvergentSeq, Digit, Epsilon};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A branch of `A_o^m`: the set of points sharing the first `m` OCF digits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchInterval {
    pub m: usize,
    pub left: Rational,
    pub right: Rational,
    pub digit_word: Vec<Digit>,
}

impl BranchInterval {
    pub fn len(&self) -> Rational {
        &self.right - &self.left
    }

    /// `|J| q_m^2`, which lies in `[1 - g, 1/g]`.
    pub fn scaled_len(&self, q_m: &BigInt) -> Rational {
        let q = Rational::from_integer(q_m.clone());
        self.len() * &q * q
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.left <= x && x <= &self.right
    }

    fn touches(&self, other: &BranchInterval) -> bool {
        self.right == other.left || other.right == self.left
    }
}

fn ocf_convergents(x: &Rational, depth: usize) -> Result<ConvergentSeq> {
    Ok(convergents(&expand(&CfAlgorithm::Ocf, x, depth)?))
}

/// Number of leading digits that are not terminal.
fn live_depth(c: &ConvergentSeq) -> usize {
    c.digits.iter().take_while(|d| d.epsilon != Epsilon::Terminal).count()
}

fn branch_of(c: &ConvergentSeq, m: usize) -> Result<BranchInterval> {
    let live = live_depth(c);
    if m > live {
        return Err(Error::DepthExceeded { requested: m, reached: live });
    }
    let eps = if m == 0 { 1 } else { c.digits[m - 1].epsilon.as_i32() };
    let (pm, qm) = (c.p_at(m as isize), c.q_at(m as isize));
    let (pm1, qm1) = (c.p_at(m as isize - 1), c.q_at(m as isize - 1));
    let a = Rational::new(pm.clone(), qm.clone())?;
    let b = Rational::new(pm + eps * pm1, qm + eps * qm1)?;
    let (left, right) = if a < b { (a, b) } else { (b, a) };
    Ok(BranchInterval { m, left, right, digit_word: c.digits[..m].to_vec() })
}

/// The branch of `A_o^m` containing `x`. Its endpoints are `p_m/q_m` and
/// `(p_m + eps_m p_{m-1})/(q_m + eps_m q_{m-1})`.
pub fn branch(m: usize, x: &Rational) -> Result<BranchInterval> {
    if x.is_negative() || *x > 1 {
        return Err(Error::Domain(format!("{x} is outside [0, 1]")));
    }
    let c = ocf_convergents(x, m + 1)?;
    branch_of(&c, m)
}

/// The branches of `A_o^m` adjacent to `j` on the left and on the right
/// (none past 0 or 1). Found by probing just outside each endpoint; adjacent
/// lengths differ by a bounded factor, so `|J| / 2^40` lands inside them.
pub fn adjacent_branches(j: &BranchInterval) -> Result<(Option<BranchInterval>, Option<BranchInterval>)> {
    let delta = j.len() * Rational::new(1, 1u64 << 40)?;
    let probe = |y: Rational| -> Result<Option<BranchInterval>> {
        if y.is_negative() || y > 1 {
            return Ok(None);
        }
        branch(j.m, &y).map(Some)
    };
    Ok((probe(&j.left - &delta)?, probe(&j.right + &delta)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplitCase {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Splitting {
    /// Deepest level with the same or adjacent branches.
    pub n: usize,
    /// `n` minus the deepest level with the same branch.
    pub delta: usize,
    pub case: SplitCase,
    /// Whether the digit and convergent relations of the case hold, with the
    /// point of larger `a_n` (case D) or `a_{n-1}` (case C) taken first.
    pub relations_hold: bool,
    /// For cases B and C, `|x - p_n/q_n| = beta_n(x)/q_n` for both points.
    pub distance_identity: Option<bool>,
    /// Case D: whether the first argument is the one with the larger digit.
    pub first_is_primary: bool,
}

/// Splitting number of `xa`, `xb` for the odd map, with the case analysis
/// of the two orbits at that depth.
pub fn splitting_number(xa: &Rational, xb: &Rational, max_depth: usize) -> Result<Splitting> {
    if xa == xb {
        return Err(Error::Domain("splitting number needs two distinct points".into()));
    }
    for x in [xa, xb] {
        if x.is_negative() || *x > 1 {
            return Err(Error::Domain(format!("{x} is outside [0, 1]")));
        }
    }
    let ca = ocf_convergents(xa, max_depth + 1)?;
    let cb = ocf_convergents(xb, max_depth + 1)?;
    let (mut m, mut n) = (0, 0);
    let mut split = false;
    for j in 1..=max_depth {
        let ja = branch_of(&ca, j)?;
        let jb = branch_of(&cb, j)?;
        if ja == jb {
            m = j;
            n = j;
        } else if ja.touches(&jb) {
            n = j;
        } else {
            split = true;
            break;
        }
    }
    if !split {
        return Err(Error::DepthExceeded { requested: max_depth, reached: max_depth });
    }
    let delta = n - m;
    let a_at = |c: &ConvergentSeq, k: usize| c.digits[k - 1].a.clone();
    let eps_at = |c: &ConvergentSeq, k: usize| c.digits[k - 1].epsilon.as_i32();
    let (case, first_is_primary) = match delta {
        0 => (SplitCase::A, true),
        1 if a_at(&ca, n) == a_at(&cb, n) => (SplitCase::B, true),
        1 => (SplitCase::D, a_at(&ca, n) > a_at(&cb, n)),
        2 => (SplitCase::C, a_at(&ca, n - 1) > a_at(&cb, n - 1)),
        _ => return Err(Error::AlignmentViolation(format!("splitting gap {delta} for {xa}, {xb}"))),
    };
    let (c, c2) = if first_is_primary { (&ca, &cb) } else { (&cb, &ca) };
    let big = |k: usize| BigInt::from(k);
    let (relations_hold, distance_identity) = match case {
        SplitCase::A => (true, None),
        SplitCase::B => {
            let a = a_at(c, n);
            let ok = a.bit(0)
                && c.p[n] == c2.p[n]
                && c.q[n] == c2.q[n]
                && eps_at(c, n) == -eps_at(c2, n);
            (ok, Some(distance_identity_holds(c, n) && distance_identity_holds(c2, n)))
        }
        SplitCase::C => {
            let ok = BigInt::from(a_at(c, n - 1)) == BigInt::from(a_at(c2, n - 1)) + big(2)
                && eps_at(c, n - 1) == -1
                && eps_at(c2, n - 1) == 1
                && a_at(c, n) == 1u32.into()
                && a_at(c2, n) == 1u32.into()
                && eps_at(c, n) == 1
                && eps_at(c2, n) == 1
                && c.q[n - 1] == &c2.q[n - 1] + 2 * &c.q[n - 2]
                && c.p[n - 1] == &c2.p[n - 1] + 2 * &c.p[n - 2]
                && c.q[n] == c2.q[n]
                && 2 * &c.q[n] == &c.q[n - 1] + &c2.q[n - 1];
            (ok, Some(distance_identity_holds(c, n) && distance_identity_holds(c2, n)))
        }
        SplitCase::D => {
            let ok = BigInt::from(a_at(c, n)) == BigInt::from(a_at(c2, n)) + big(2)
                && eps_at(c, n) == -1
                && eps_at(c2, n) == 1
                && c.q[n] == &c2.q[n] + 2 * &c.q[n - 1]
                && c.p[n] == &c2.p[n] + 2 * &c.p[n - 1];
            (ok, None)
        }
    };
    Ok(Splitting { n, delta, case, relations_hold, distance_identity, first_is_primary })
}

/// `|x - p_n/q_n| = beta_n(x) / q_n`, exactly.
fn distance_identity_holds(c: &ConvergentSeq, n: usize) -> bool {
    let q = Rational::from_integer(c.q[n].clone());
    let xpp = c.convergent(n);
    (&c.x0 - xpp).abs() == &c.beta[n] / q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::rational::rat;

    fn dec(digits: &str) -> Rational {
        let den = num_bigint::BigInt::from(10u32).pow(digits.len() as u32);
        Rational::new(digits.parse::<BigInt>().unwrap(), den).unwrap()
    }

    fn pi_frac() -> Rational {
        dec("141592653589793238462643383279502884")
    }

    fn e_frac() -> Rational {
        dec("718281828459045235360287471352662497")
    }

    #[test]
    fn first_branch() {
        let j = branch(1, &rat(3, 4)).unwrap();
        assert_eq!((j.left.clone(), j.right.clone()), (rat(1, 2), rat(1, 1)));
        let j0 = branch(0, &rat(3, 4)).unwrap();
        assert_eq!((j0.left, j0.right), (rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn branch_length_bracket() {
        let (lo, hi) = (Rational::one() - golden::g_lo(), golden::g_hi().recip().unwrap());
        let x = pi_frac();
        for m in 0..20 {
            let j = branch(m, &x).unwrap();
            assert!(j.contains(&x));
            let c = ocf_convergents(&x, m + 1).unwrap();
            let s = j.scaled_len(&c.q[m]);
            assert!(lo <= s && s <= hi, "m={m}: {s}");
        }
    }

    #[test]
    fn adjacent_ratio_is_bounded() {
        let c5 = golden::c5();
        let x = e_frac();
        for m in 1..16 {
            let j = branch(m, &x).unwrap();
            let (l, r) = adjacent_branches(&j).unwrap();
            for k in [l, r].into_iter().flatten() {
                assert!(k.touches(&j));
                let ratio = (j.len() / k.len()).to_f64();
                assert!(ratio <= c5 && ratio >= 1.0 / c5, "m={m}: {ratio}");
            }
        }
    }

    #[test]
    fn shared_prefix_gives_case_a() {
        // Two points deep in the same branch of A_o^5 that separate further down.
        let y = pi_frac();
        let j = branch(5, &y).unwrap();
        let z = &j.left + j.len() * e_frac();
        let s = splitting_number(&y, &z, 40).unwrap();
        assert!(s.n >= 5);
        assert!(s.delta <= 2);
        assert!(s.relations_hold);
        let t = splitting_number(&z, &y, 40).unwrap();
        assert_eq!((s.n, s.delta, s.case), (t.n, t.delta, t.case));
    }

    #[test]
    fn straddling_a_convergent_gives_case_b() {
        // x_{n-1} on either side of 1/(2k+1): here n = 1, k = 1.
        let s = splitting_number(&dec("299900000017"), &dec("351700000023"), 20).unwrap();
        assert_eq!((s.n, s.delta, s.case), (1, 1, SplitCase::B));
        assert!(s.relations_hold);
        assert_eq!(s.distance_identity, Some(true));
    }

    #[test]
    fn straddling_an_even_reciprocal_gives_case_d() {
        // 1/(2k+1) <= x <= 1/(2k) <= x' <= 1/(2k-1) with k = 2, and x_1 not in [1/2, 1].
        let s = splitting_number(&rat(21, 100), &rat(27, 100), 20).unwrap();
        assert_eq!(s.case, SplitCase::D, "{s:?}");
        assert!(s.relations_hold && s.first_is_primary);
        let t = splitting_number(&rat(27, 100), &rat(21, 100), 20).unwrap();
        assert!(t.relations_hold && !t.first_is_primary);
    }
}
