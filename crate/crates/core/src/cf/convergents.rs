use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use super::{ser_display, CfAlgorithm, Digit, Epsilon, Orbit};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Principal convergents `p_n/q_n`, `n = 0..=N`, of an orbit.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergentSeq {
    pub algorithm: CfAlgorithm,
    pub x0: Rational,
    pub digits: Vec<Digit>,
    #[serde(serialize_with = "ser_vec_display")]
    pub p: Vec<BigInt>,
    #[serde(serialize_with = "ser_vec_display")]
    pub q: Vec<BigInt>,
    #[serde(serialize_with = "ser_display")]
    pub p_minus1: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub q_minus1: BigInt,
    /// `epsilon_prefix[n] = eps_1 * ... * eps_n`, 0 once a terminal digit occurs.
    pub epsilon_prefix: Vec<i32>,
    /// `beta[n] = |q_n x0 - p_n|`.
    pub beta: Vec<Rational>,
}

fn ser_vec_display<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub fn convergents(orbit: &Orbit) -> ConvergentSeq {
    let alg = &orbit.algorithm;
    let (pm1, qm1, p0, q0) = match alg {
        CfAlgorithm::Oocf => (-1, 1, 1, 1),
        _ => (1, 0, 0, 1),
    };
    let n = orbit.digits.len();
    let mut p = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    p.push(BigInt::from(p0));
    q.push(BigInt::from(q0));
    let mut prev_p = BigInt::from(pm1);
    let mut prev_q = BigInt::from(qm1);
    // eps_0 = +1 in both recursions.
    let mut prev_eps = 1;
    let mut epsilon_prefix = vec![1];
    for digit in &orbit.digits {
        let c = digit.coefficient(alg);
        let last_p = p.last().unwrap().clone();
        let last_q = q.last().unwrap().clone();
        let np = &c * &last_p + prev_eps * &prev_p;
        let nq = &c * &last_q + prev_eps * &prev_q;
        prev_p = last_p;
        prev_q = last_q;
        p.push(np);
        q.push(nq);
        prev_eps = digit.epsilon.as_i32();
        epsilon_prefix.push(epsilon_prefix.last().unwrap() * prev_eps);
    }
    let x0 = orbit.x0().clone();
    let beta = p
        .iter()
        .zip(&q)
        .map(|(pn, qn)| (&x0 * Rational::from_integer(qn.clone()) - Rational::from_integer(pn.clone())).abs())
        .collect();
    ConvergentSeq {
        algorithm: alg.clone(),
        x0,
        digits: orbit.digits.clone(),
        p,
        q,
        p_minus1: BigInt::from(pm1),
        q_minus1: BigInt::from(qm1),
        epsilon_prefix,
        beta,
    }
}

impl ConvergentSeq {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `p_n` for `n >= -1`.
    pub fn p_at(&self, n: isize) -> &BigInt {
        if n < 0 {
            &self.p_minus1
        } else {
            &self.p[n as usize]
        }
    }

    pub fn q_at(&self, n: isize) -> &BigInt {
        if n < 0 {
            &self.q_minus1
        } else {
            &self.q[n as usize]
        }
    }

    pub fn convergent(&self, n: usize) -> Rational {
        Rational::new(self.p[n].clone(), self.q[n].clone()).expect("q_n > 0")
    }

    /// `|q_{-1} x - p_{-1}|`: 1, or `x + 1` for OOCF.
    pub fn beta_minus1(&self) -> Rational {
        (&self.x0 * Rational::from_integer(self.q_minus1.clone()) - Rational::from_integer(self.p_minus1.clone())).abs()
    }

    /// `p_{n-1} q_n - p_n q_{n-1}` for `n >= 0`.
    pub fn det(&self, n: usize) -> BigInt {
        let n = n as isize;
        self.p_at(n - 1) * self.q_at(n) - self.p_at(n) * self.q_at(n - 1)
    }

    /// Expected value of [`det`](Self::det): `(-1)^n eps_1 ... eps_{n-1}`
    /// (and twice that for OOCF, up to sign).
    pub fn det_expected_abs(&self) -> BigInt {
        match self.algorithm {
            CfAlgorithm::Oocf => BigInt::from(2),
            _ => BigInt::one(),
        }
    }

    /// `x_n` recovered from `x0` alone: `-eps_n (q_n x - p_n)/(q_{n-1} x - p_{n-1})`.
    /// For OOCF this is `iota(x_n)`.
    pub fn invert(&self, n: usize) -> Rational {
        assert!(n >= 1 && n <= self.len());
        let x = &self.x0;
        let num = x * Rational::from_integer(self.q[n].clone()) - Rational::from_integer(self.p[n].clone());
        if num.is_zero() {
            return num;
        }
        let den = x * Rational::from_integer(self.q[n - 1].clone()) - Rational::from_integer(self.p[n - 1].clone());
        let eps = Rational::from_integer(self.digits[n - 1].epsilon.as_i32());
        -(eps * num / den)
    }

    /// `x` rebuilt from the first `n` digits and the tail `y = x_n`
    /// (`iota(x_n)` for OOCF).
    pub fn reconstruct(&self, n: usize, y: &Rational) -> Rational {
        let pn = Rational::from_integer(self.p_at(n as isize).clone());
        let qn = Rational::from_integer(self.q_at(n as isize).clone());
        if n == 0 && !matches!(self.algorithm, CfAlgorithm::Oocf) {
            return y.clone();
        }
        let eps = if n == 0 {
            1
        } else {
            match self.digits[n - 1].epsilon {
                Epsilon::Terminal => return pn / qn,
                e => e.as_i32(),
            }
        };
        let e = Rational::from_integer(eps);
        let pm = Rational::from_integer(self.p_at(n as isize - 1).clone());
        let qm = Rational::from_integer(self.q_at(n as isize - 1).clone());
        (pn + &e * pm * y) / (qn + e * qm * y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityClass {
    /// `p` and `q` of different parities.
    InfRational,
    /// `p` and `q` both odd.
    OneRational,
}

pub fn classify_parity(p: &BigInt, q: &BigInt) -> Result<ParityClass> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("denominator {q} is not positive")));
    }
    if !p.gcd(q).is_one() {
        return Err(Error::Domain(format!("{p}/{q} is not in lowest terms")));
    }
    Ok(if p.is_odd() && q.is_odd() { ParityClass::OneRational } else { ParityClass::InfRational })
}

/// `(P_{n,i}, Q_{n,i}) = (i P_{n-1} + P_{n-2}, i Q_{n-1} + Q_{n-2})` for
/// `i = 0..=a_n`, from an RCF convergent sequence.
pub fn intermediate_convergents(rcf: &ConvergentSeq, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
    if !matches!(rcf.algorithm, CfAlgorithm::Rcf) {
        return Err(Error::Domain("intermediate convergents need an RCF expansion".into()));
    }
    if n == 0 || n > rcf.len() {
        return Err(Error::Domain(format!("index {n} outside 1..={}", rcf.len())));
    }
    let n = n as isize;
    let (p1, q1) = (rcf.p_at(n - 1), rcf.q_at(n - 1));
    let (p2, q2) = (rcf.p_at(n - 2), rcf.q_at(n - 2));
    let a = rcf.digits[(n - 1) as usize].a_u64();
    Ok((0..=a)
        .map(|i| {
            let i = BigInt::from(i);
            (&i * p1 + p2, &i * q1 + q2)
        })
        .collect())
}
