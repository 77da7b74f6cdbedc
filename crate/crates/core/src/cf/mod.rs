//! Exact continued-fraction maps and their orbits.
//!
//! Every map sends a reduced rational `n/d` to a reduced rational through an
//! integer-unimodular transformation, so orbits never need a gcd.

mod align;
mod convergents;
mod maps;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use align::{align_with_rcf, AlignmentRow, AlignmentTable, RcfLabel};
pub use convergents::{classify_parity, convergents, intermediate_convergents, ConvergentSeq, ParityClass};
pub use maps::{iota, jump_bcf};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CfAlgorithm {
    /// Regular continued fractions, the Gauss map.
    Rcf,
    /// Nakada's alpha-continued fractions, `alpha` in `[0, 1)`; `alpha = 1`
    /// is represented by [`CfAlgorithm::Rcf`].
    Alpha(Rational),
    /// Odd continued fractions (odd partial quotients).
    Ocf,
    /// Even continued fractions (even partial quotients).
    Ecf,
    /// Odd-odd continued fractions, conjugate to `Ecf` through [`iota`].
    Oocf,
}

impl CfAlgorithm {
    pub fn alpha(alpha: Rational) -> Result<Self> {
        if alpha.is_negative() || alpha > 1 {
            return Err(Error::Domain(format!("alpha = {alpha} is outside [0, 1]")));
        }
        if alpha.is_one() {
            Ok(CfAlgorithm::Rcf)
        } else {
            Ok(CfAlgorithm::Alpha(alpha))
        }
    }

    /// Backward continued fractions, `alpha = 0`.
    pub fn bcf() -> Self {
        CfAlgorithm::Alpha(Rational::zero())
    }

    /// Nearest-integer continued fractions, `alpha = 1/2`.
    pub fn nicf() -> Self {
        CfAlgorithm::Alpha(Rational::new(1, 2).unwrap())
    }

    pub fn alpha_value(&self) -> Option<Rational> {
        match self {
            CfAlgorithm::Rcf => Some(Rational::one()),
            CfAlgorithm::Alpha(a) => Some(a.clone()),
            _ => None,
        }
    }

    /// Right end of the fundamental interval: `max(alpha, 1 - alpha)` for the
    /// alpha family, `1` otherwise.
    pub fn upper(&self) -> Rational {
        match self {
            CfAlgorithm::Alpha(a) => {
                let b = Rational::one() - a;
                if *a > b {
                    a.clone()
                } else {
                    b
                }
            }
            _ => Rational::one(),
        }
    }

    /// Maps with an indifferent fixed point need long runs of steps near it.
    pub fn is_indifferent(&self) -> bool {
        match self {
            CfAlgorithm::Alpha(a) => a.is_zero(),
            CfAlgorithm::Ecf | CfAlgorithm::Oocf => true,
            _ => false,
        }
    }

    pub(crate) fn is_terminal_point(&self, p: &Point) -> bool {
        match self {
            CfAlgorithm::Oocf => p.n == p.d,
            _ => p.n.is_zero(),
        }
    }

    pub(crate) fn is_absorbing_point(&self, p: &Point) -> bool {
        match self {
            CfAlgorithm::Ecf => p.n == p.d,
            CfAlgorithm::Oocf => p.n.is_zero(),
            _ => false,
        }
    }

    fn check_domain(&self, x: &Rational) -> Result<()> {
        let upper = self.upper();
        let ok = match self {
            CfAlgorithm::Rcf | CfAlgorithm::Alpha(_) => !x.is_negative() && *x <= upper,
            _ => !x.is_negative() && *x <= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x} is outside the domain of {self}")))
        }
    }
}

impl fmt::Display for CfAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfAlgorithm::Rcf => write!(f, "rcf"),
            CfAlgorithm::Alpha(a) => write!(f, "alpha:{a}"),
            CfAlgorithm::Ocf => write!(f, "ocf"),
            CfAlgorithm::Ecf => write!(f, "ecf"),
            CfAlgorithm::Oocf => write!(f, "oocf"),
        }
    }
}

impl fmt::Debug for CfAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CfAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rcf" => Ok(CfAlgorithm::Rcf),
            "bcf" => Ok(CfAlgorithm::bcf()),
            "nicf" => Ok(CfAlgorithm::nicf()),
            "ocf" => Ok(CfAlgorithm::Ocf),
            "ecf" => Ok(CfAlgorithm::Ecf),
            "oocf" => Ok(CfAlgorithm::Oocf),
            other => match other.strip_prefix("alpha:") {
                Some(a) => CfAlgorithm::alpha(a.parse()?),
                None => Err(Error::Parse(format!(
                    "unknown algorithm {s:?} (expected rcf, alpha:<a/b>, bcf, nicf, ocf, ecf, oocf)"
                ))),
            },
        }
    }
}

impl Serialize for CfAlgorithm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
    /// The step landed on the terminal value (0, or 1 for OOCF).
    Terminal,
}

impl Epsilon {
    pub fn as_i32(self) -> i32 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
            Epsilon::Terminal => 0,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
            Epsilon::Terminal => "T",
        })
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Digit {
    #[serde(serialize_with = "ser_display")]
    pub a: BigUint,
    pub epsilon: Epsilon,
}

impl Digit {
    pub fn new(a: u64, epsilon: Epsilon) -> Self {
        Digit { a: BigUint::from(a), epsilon }
    }

    /// The digit as a small integer, saturating for absurdly large values.
    pub fn a_u64(&self) -> u64 {
        self.a.to_u64().unwrap_or(u64::MAX)
    }

    /// Coefficient in the convergent recursion: `a` for most maps,
    /// `2a + eps - 1` for OOCF. A terminal OOCF step comes from the branch
    /// with `eps = +1`.
    pub(crate) fn coefficient(&self, alg: &CfAlgorithm) -> BigInt {
        let a = BigInt::from(self.a.clone());
        match alg {
            CfAlgorithm::Oocf => match self.epsilon {
                Epsilon::Minus => 2 * a - 2,
                _ => 2 * a,
            },
            _ => a,
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.epsilon)
    }
}

pub(crate) fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A reduced nonnegative rational `n/d` in the working representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Point {
    pub n: BigUint,
    pub d: BigUint,
}

impl Point {
    pub fn from_rational(x: &Rational) -> Self {
        debug_assert!(!x.is_negative());
        Point { n: x.numer().magnitude().clone(), d: x.denom().magnitude().clone() }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new_raw(BigInt::from(self.n.clone()), BigInt::from(self.d.clone()))
    }

    pub fn zero() -> Self {
        Point { n: BigUint::zero(), d: BigUint::one() }
    }

    pub fn one() -> Self {
        Point { n: BigUint::one(), d: BigUint::one() }
    }

    /// `ln x`; only for `x > 0`.
    pub fn ln(&self) -> f64 {
        crate::rational::ln_ratio(&self.n, &self.d)
    }

    /// `iota(x) = (1 - x)/(1 + x)` as a ratio `(d - n, d + n)`, not reduced.
    pub fn iota_parts(&self) -> (BigUint, BigUint) {
        (&self.d - &self.n, &self.d + &self.n)
    }

    /// `ln iota(x)`; only for `x < 1`.
    pub fn ln_iota(&self) -> f64 {
        let (a, b) = self.iota_parts();
        crate::rational::ln_ratio(&a, &b)
    }
}

/// One application of the map on the working representation.
pub(crate) fn raw_step(alg: &CfAlgorithm, x: &Point) -> (Point, Digit) {
    match alg {
        CfAlgorithm::Oocf => oocf_step(x),
        _ => {
            let (a0, r) = x.d.div_rem(&x.n);
            let a = match alg {
                CfAlgorithm::Rcf => a0,
                CfAlgorithm::Alpha(alpha) => {
                    // floor(1/x - alpha + 1) = a0 + [frac(1/x) >= alpha];
                    // an integral 1/x keeps a0 and terminates.
                    let s = alpha.numer().magnitude();
                    let t = alpha.denom().magnitude();
                    if !r.is_zero() && &r * t >= s * &x.n {
                        a0 + 1u32
                    } else {
                        a0
                    }
                }
                CfAlgorithm::Ocf | CfAlgorithm::Ecf => {
                    // x lies in [1/(k+1), 1/k) with x = 1 assigned to k = 1.
                    let k = if x.n == x.d {
                        BigUint::one()
                    } else if r.is_zero() {
                        a0 - 1u32
                    } else {
                        a0
                    };
                    let odd = k.is_odd();
                    let bump = if matches!(alg, CfAlgorithm::Ocf) { !odd } else { odd };
                    if bump {
                        k + 1u32
                    } else {
                        k
                    }
                }
                CfAlgorithm::Oocf => unreachable!(),
            };
            let an = &a * &x.n;
            let (num, epsilon) = match x.d.cmp(&an) {
                Ordering::Greater => (&x.d - an, Epsilon::Plus),
                Ordering::Less => (an - &x.d, Epsilon::Minus),
                Ordering::Equal => (BigUint::zero(), Epsilon::Terminal),
            };
            let next = if num.is_zero() { Point::zero() } else { Point { n: num, d: x.n.clone() } };
            (next, Digit { a, epsilon })
        }
    }
}

fn oocf_step(x: &Point) -> (Point, Digit) {
    // x in [(k-1)/k, k/(k+1)): the increasing branch up to (2k-1)/(2k+1),
    // the decreasing one after it.
    let k = &x.d / (&x.d - &x.n);
    let two_k = &k * 2u32;
    let u = (&k * &x.n + &x.d) - &k * &x.d;
    let v = &k * &x.d - (&k + 1u32) * &x.n;
    if &x.n * (&two_k + 1u32) < (two_k - 1u32) * &x.d {
        let next = if u.is_zero() { Point::zero() } else { Point { n: u, d: v } };
        (next, Digit { a: k + 1u32, epsilon: Epsilon::Minus })
    } else if u == v {
        (Point::one(), Digit { a: k, epsilon: Epsilon::Terminal })
    } else {
        (Point { n: v, d: u }, Digit { a: k, epsilon: Epsilon::Plus })
    }
}

/// One step of the map: `(A(x), digit)`.
///
/// `x` must already lie in the fundamental domain. An integral `1/x` is
/// mapped to 0 with a terminal digit for the alpha family, so the backward
/// map sends 1 to 0 rather than fixing it.
pub fn step(alg: &CfAlgorithm, x: &Rational) -> Result<(Rational, Digit)> {
    alg.check_domain(x)?;
    let p = Point::from_rational(x);
    if alg.is_terminal_point(&p) {
        return Err(Error::Terminal(format!("{x} is terminal for {alg}")));
    }
    let (next, digit) = raw_step(alg, &p);
    Ok((next.to_rational(), digit))
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub algorithm: CfAlgorithm,
    pub input: Rational,
    #[serde(serialize_with = "ser_display")]
    pub integer_part: BigInt,
    /// The alpha family folds `(alpha_bar, 1)` onto `(0, 1 - alpha_bar)`.
    pub reflected: bool,
    pub points: Vec<Rational>,
    pub digits: Vec<Digit>,
    pub terminated: bool,
    /// Stopped at an indifferent fixed point (1 for ECF, 0 for OOCF).
    pub absorbed: bool,
}

impl Orbit {
    pub fn x0(&self) -> &Rational {
        &self.points[0]
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Brings `x` into the fundamental domain: `(reduced, integer part, reflected)`.
pub fn reduce_to_domain(alg: &CfAlgorithm, x: &Rational) -> (Rational, BigInt, bool) {
    let int = x.floor();
    let frac = x.fract();
    match alg {
        CfAlgorithm::Alpha(_) => {
            if frac > alg.upper() {
                (Rational::one() - frac, int, true)
            } else {
                (frac, int, false)
            }
        }
        _ => (frac, int, false),
    }
}

/// Orbit of `x` under `alg` for at most `max_depth` steps.
pub fn expand(alg: &CfAlgorithm, x: &Rational, max_depth: usize) -> Result<Orbit> {
    let (x0, integer_part, reflected) = reduce_to_domain(alg, x);
    let mut cur = Point::from_rational(&x0);
    if alg.is_terminal_point(&cur) {
        return Err(Error::Terminal(format!("{x} reduces to a terminal point of {alg}")));
    }
    let mut orbit = Orbit {
        algorithm: alg.clone(),
        input: x.clone(),
        integer_part,
        reflected,
        points: vec![x0],
        digits: Vec::new(),
        terminated: false,
        absorbed: false,
    };
    while orbit.digits.len() < max_depth {
        if alg.is_absorbing_point(&cur) {
            orbit.terminated = true;
            orbit.absorbed = true;
            break;
        }
        let (next, digit) = raw_step(alg, &cur);
        let terminal = digit.epsilon == Epsilon::Terminal;
        orbit.points.push(next.to_rational());
        orbit.digits.push(digit);
        cur = next;
        if terminal {
            orbit.terminated = true;
            break;
        }
    }
    Ok(orbit)
}
