//! Matching OCF, ECF and OOCF convergents against the RCF principal and
//! intermediate convergents, and checking the known transition patterns.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{classify_parity, convergents, expand, CfAlgorithm, ConvergentSeq, ParityClass};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// How one alg-convergent relates to the RCF expansion. A rational may carry
/// several labels at once (e.g. a mediant that is also principal when the
/// next RCF digit is 1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RcfLabel {
    /// `P_n/Q_n`.
    pub principal: Option<usize>,
    /// `(P_{n+1} + P_n)/(Q_{n+1} + Q_n)`.
    pub mediant: Option<usize>,
    /// `P_{n,i}/Q_{n,i}` with `1 <= i < a_n`.
    pub intermediate: Option<(usize, String)>,
}

impl RcfLabel {
    pub fn is_principal(&self) -> bool {
        self.principal.is_some()
    }

    pub fn is_matched(&self) -> bool {
        self.principal.is_some() || self.mediant.is_some() || self.intermediate.is_some()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentRow {
    pub k: usize,
    #[serde(serialize_with = "super::ser_display")]
    pub p: BigInt,
    #[serde(serialize_with = "super::ser_display")]
    pub q: BigInt,
    pub label: RcfLabel,
    /// Transition pattern from index `k` to `k + 1`, or `None` outside the
    /// checked window.
    pub case: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentTable {
    pub algorithm: CfAlgorithm,
    pub rows: Vec<AlignmentRow>,
    /// Number of transitions `k -> k+1` that were checked.
    pub checked: usize,
}

/// Labels every convergent of `alg` against the RCF convergents of `x` and
/// checks the allowed transition patterns.
///
/// Only transitions whose denominators stay below the penultimate RCF
/// denominator are checked: at the very end of a finite expansion the last
/// RCF digit can be written two ways, which breaks the patterns spuriously.
pub fn align_with_rcf(alg: &CfAlgorithm, x: &Rational, depth: usize) -> Result<AlignmentTable> {
    if !matches!(alg, CfAlgorithm::Ocf | CfAlgorithm::Ecf | CfAlgorithm::Oocf) {
        return Err(Error::Domain(format!("alignment is defined for ocf, ecf and oocf, not {alg}")));
    }
    let rcf = convergents(&expand(&CfAlgorithm::Rcf, x, usize::MAX)?);
    let own = convergents(&expand(alg, x, depth)?);
    let index = RcfIndex::new(&rcf);

    let rows_pq: Vec<(BigInt, BigInt)> = own.p.iter().cloned().zip(own.q.iter().cloned()).collect();
    let labels: Vec<RcfLabel> = rows_pq.iter().map(|(p, q)| index.label(p, q)).collect();

    let nr = rcf.len();
    let limit = if nr >= 2 { rcf.q[nr - 1].clone() } else { BigInt::zero() };
    let mut rows = Vec::with_capacity(rows_pq.len());
    let mut checked = 0;
    for (k, ((p, q), label)) in rows_pq.iter().zip(&labels).enumerate() {
        let in_window = k + 1 < rows_pq.len() && rows_pq[k + 1].1 < limit;
        let case = if in_window {
            checked += 1;
            Some(check_transition(alg, &rcf, k, (p, q), label, &rows_pq[k + 1], &labels[k + 1])?)
        } else {
            None
        };
        rows.push(AlignmentRow { k, p: p.clone(), q: q.clone(), label: label.clone(), case });
    }
    check_coverage(alg, &rcf, &own, &limit)?;
    Ok(AlignmentTable { algorithm: alg.clone(), rows, checked })
}

struct RcfIndex<'a> {
    rcf: &'a ConvergentSeq,
    principal: HashMap<(BigInt, BigInt), usize>,
    mediant: HashMap<(BigInt, BigInt), usize>,
}

impl<'a> RcfIndex<'a> {
    fn new(rcf: &'a ConvergentSeq) -> Self {
        let mut principal = HashMap::new();
        let mut mediant = HashMap::new();
        for n in 0..=rcf.len() {
            principal.insert((rcf.p[n].clone(), rcf.q[n].clone()), n);
            if n < rcf.len() {
                mediant.insert((&rcf.p[n + 1] + &rcf.p[n], &rcf.q[n + 1] + &rcf.q[n]), n);
            }
        }
        RcfIndex { rcf, principal, mediant }
    }

    fn label(&self, p: &BigInt, q: &BigInt) -> RcfLabel {
        let key = (p.clone(), q.clone());
        RcfLabel {
            principal: self.principal.get(&key).copied(),
            mediant: self.mediant.get(&key).copied(),
            intermediate: self.intermediate(p, q).map(|(n, i)| (n, i.to_string())),
        }
    }

    /// `(n, i)` with `q = i Q_{n-1} + Q_{n-2}`, `1 <= i < a_n`, matching `p` too.
    fn intermediate(&self, p: &BigInt, q: &BigInt) -> Option<(usize, BigInt)> {
        let r = self.rcf;
        for n in 1..=r.len() {
            let (qa, qb) = (r.q_at(n as isize - 1), r.q_at(n as isize - 2));
            if qa.is_zero() || q <= qb {
                continue;
            }
            let (i, rem) = (q - qb).div_rem(qa);
            if !rem.is_zero() || i < BigInt::one() || i >= BigInt::from(r.digits[n - 1].a.clone()) {
                continue;
            }
            if &i * r.p_at(n as isize - 1) + r.p_at(n as isize - 2) == *p {
                return Some((n, i));
            }
        }
        None
    }
}

fn violation(alg: &CfAlgorithm, k: usize, what: &str) -> Error {
    Error::AlignmentViolation(format!("{alg} convergent {k}: {what}"))
}

/// `Q_{n,i}` for the RCF sequence.
fn q_inter(rcf: &ConvergentSeq, n: usize, i: &BigInt) -> BigInt {
    i * rcf.q_at(n as isize - 1) + rcf.q_at(n as isize - 2)
}

/// Returns the first allowed pattern that matches the transition `k -> k+1`.
/// A convergent with several labels may follow any of their patterns.
fn check_transition(
    alg: &CfAlgorithm,
    rcf: &ConvergentSeq,
    k: usize,
    (p, q): (&BigInt, &BigInt),
    label: &RcfLabel,
    (_, q_next): &(BigInt, BigInt),
    next: &RcfLabel,
) -> Result<&'static str> {
    let nr = rcf.len();
    let inter = label.intermediate.as_ref().map(|(m, i)| (*m, i.parse::<BigInt>().unwrap()));
    match alg {
        CfAlgorithm::Ocf => {
            if let Some(n) = label.principal {
                if next.principal == Some(n + 1) {
                    return Ok("P(n) -> P(n+1)");
                }
                if next.mediant == Some(n) {
                    return Ok("P(n) -> M(n)");
                }
            }
            if let Some(n) = label.mediant {
                if next.principal == Some(n + 1) {
                    return Ok("M(n) -> P(n+1)");
                }
            }
            Err(violation(alg, k, "transition matches neither P -> P/M nor M -> P"))
        }
        CfAlgorithm::Ecf => {
            if classify_parity(p, q)? != ParityClass::InfRational {
                return Err(violation(alg, k, "not an infinity-rational"));
            }
            if let Some(n) = label.principal.filter(|n| n + 1 <= nr) {
                if *q_next == rcf.q[n + 1] {
                    return Ok("P(n) -> Q(n+1)");
                }
                if *q_next == &rcf.q[n + 1] + &rcf.q[n] {
                    return Ok("P(n) -> Q(n+1)+Q(n)");
                }
            }
            // q_k = (i-1) Q_n + Q_{n-1}, q_{k+1} = i Q_n + Q_{n-1}, 2 <= i <= a_{n+1}.
            if let Some((m, i)) = inter {
                if *q_next == q_inter(rcf, m, &(i + 1)) {
                    return Ok("I(n,i-1) -> I(n,i)");
                }
            }
            Err(violation(alg, k, "transition outside the principal and intermediate patterns"))
        }
        CfAlgorithm::Oocf => {
            if classify_parity(p, q)? != ParityClass::OneRational {
                return Err(violation(alg, k, "not a 1-rational"));
            }
            if let Some(n) = label.principal.filter(|n| n + 1 <= nr) {
                if *q_next == 2 * &rcf.q[n + 1] + &rcf.q[n] {
                    return Ok("P(n) -> 2Q(n+1)+Q(n)");
                }
            }
            if let Some((m, i)) = inter {
                if *q_next == q_inter(rcf, m, &(i + 2)) {
                    return Ok("I(n,i) -> I(n,i+2)");
                }
            }
            Err(violation(alg, k, "transition outside the principal and intermediate patterns"))
        }
        _ => unreachable!(),
    }
}

/// Statements about which RCF convergents must appear among the alg ones.
fn check_coverage(alg: &CfAlgorithm, rcf: &ConvergentSeq, own: &ConvergentSeq, limit: &BigInt) -> Result<()> {
    let own_set: std::collections::HashSet<(BigInt, BigInt)> =
        own.p.iter().cloned().zip(own.q.iter().cloned()).collect();
    let own_max = own.q.iter().max().cloned().unwrap_or_default();
    let bound = if &own_max < limit { own_max } else { limit.clone() };
    for n in 0..rcf.len() {
        // The next denominator must also be in range for the statement to apply.
        if rcf.q[n + 1] >= bound {
            break;
        }
        let key = (rcf.p[n].clone(), rcf.q[n].clone());
        let present = own_set.contains(&key);
        match alg {
            CfAlgorithm::Ocf if !present && !rcf.digits[n].a.is_one() => {
                return Err(Error::AlignmentViolation(format!(
                    "ocf: P_{n}/Q_{n} is missing although a_{} != 1",
                    n + 1
                )));
            }
            CfAlgorithm::Ecf if !present && classify_parity(&rcf.p[n], &rcf.q[n])? == ParityClass::InfRational => {
                return Err(Error::AlignmentViolation(format!(
                    "ecf: infinity-rational P_{n}/Q_{n} is not an ECF convergent"
                )));
            }
            CfAlgorithm::Oocf if classify_parity(&rcf.p[n], &rcf.q[n])? == ParityClass::InfRational => {
                // Every 1-rational P_{n+1,i} must be an OOCF convergent.
                let a = rcf.digits[n].a.clone();
                if a > num_bigint::BigUint::from(64u32) {
                    continue;
                }
                let mut i = BigInt::one();
                while i <= BigInt::from(a.clone()) {
                    let pi = &i * &rcf.p[n] + rcf.p_at(n as isize - 1);
                    let qi = &i * &rcf.q[n] + rcf.q_at(n as isize - 1);
                    if qi >= bound {
                        break;
                    }
                    if pi.is_odd() && qi.is_odd() && !own_set.contains(&(pi.clone(), qi.clone())) {
                        return Err(Error::AlignmentViolation(format!(
                            "oocf: 1-rational {pi}/{qi} after an infinity-rational P_{n} is missing"
                        )));
                    }
                    i += 1;
                }
            }
            _ => {}
        }
    }
    Ok(())
}
