//! Exact rationals on top of `num_rational::BigRational`, plus the few
//! floating-point conversions the series code needs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing to lowest terms with a positive denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, Error> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    /// Caller guarantees `gcd(num, den) = 1` and `den > 0`.
    pub(crate) fn new_raw(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        debug_assert!(num.gcd(&den).is_one() || num.is_zero() && den.is_one());
        Rational(BigRational::new_raw(num, den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// `x - floor(x)`, always in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        let n = self.numer().mod_floor(self.denom());
        Rational::new_raw(n, self.denom().clone())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Rational, Error> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    /// The exact value of a finite double.
    pub fn from_f64(v: f64) -> Result<Self, Error> {
        BigRational::from_float(v)
            .map(Rational)
            .ok_or_else(|| Error::Domain(format!("{v} is not a finite number")))
    }

    pub fn to_f64(&self) -> f64 {
        // `BigRational::to_f64` handles operands beyond the f64 range.
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Natural log of a positive rational, accurate to a few ulps even when
    /// numerator and denominator are far outside the f64 range.
    pub fn ln(&self) -> f64 {
        debug_assert!(self.0.is_positive());
        ln_ratio(self.numer().magnitude(), self.denom().magnitude())
    }

    /// `self^nu` for `self >= 0`, evaluated as `exp(nu * ln self)`.
    pub fn powf(&self, nu: f64) -> f64 {
        if nu == 0.0 {
            return 1.0;
        }
        if self.is_zero() {
            return 0.0;
        }
        (nu * self.ln()).exp()
    }

    /// Exact `p/q` with `q = 10^d` for a decimal string such as `-0.375`.
    fn parse_decimal(s: &str) -> Result<Self, Error> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("empty number: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a decimal: {s:?}")));
        }
        let mut num: BigInt = digits.parse().map_err(|_| Error::Parse(s.into()))?;
        if neg {
            num = -num;
        }
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Rational::new(num, den)
    }
}

/// Natural log of a positive big integer from its leading 64 bits.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    ln_biguint(n.magnitude())
}

pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a / b` as a double, for operands of any size.
pub fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().max(a.bits()).saturating_sub(1000);
    let (a, b) = (a >> shift, b >> shift);
    let la = a.bits().saturating_sub(64);
    let lb = b.bits().saturating_sub(64);
    let fa = (&a >> la).to_u64().unwrap() as f64;
    let fb = (&b >> lb).to_u64().unwrap() as f64;
    fa / fb * 2f64.powi(la as i32 - lb as i32)
}

/// `ln(a / b)` for positive `a`, `b`; stays accurate when `a/b` is close to 1.
pub fn ln_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let (diff, neg) = if a >= b { (a - b, false) } else { (b - a, true) };
    // |a - b| < b/4: use log1p on the exact difference.
    if diff.bits() + 2 < b.bits() {
        let t = ratio_f64(&diff, b);
        return if neg { (-t).ln_1p() } else { t.ln_1p() };
    }
    ln_biguint(a) - ln_biguint(b)
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a finite decimal.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Rational::new(p, q);
        }
        Rational::parse_decimal(s)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.denom().is_one() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Shorthand for literals in tests and tables: `rat(4, 11)`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal() {
        assert_eq!("4/11".parse::<Rational>().unwrap(), rat(4, 11));
        assert_eq!("8/22".parse::<Rational>().unwrap(), rat(4, 11));
        assert_eq!("0.375".parse::<Rational>().unwrap(), rat(3, 8));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), rat(-3, 2));
        assert_eq!("7".parse::<Rational>().unwrap(), rat(7, 1));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn fract_is_in_unit_interval() {
        assert_eq!(rat(-1, 3).fract(), rat(2, 3));
        assert_eq!(rat(7, 3).fract(), rat(1, 3));
        assert!(rat(5, 1).fract().is_zero());
    }

    #[test]
    fn ln_of_huge_operands() {
        let big = BigInt::from(3u32).pow(1000);
        let x = Rational::new(big.clone() + 1, big).unwrap();
        assert!(x.ln().abs() < 1e-300 + 1e-15);
        let y = Rational::new(BigInt::one(), BigInt::from(2u32).pow(2000)).unwrap();
        assert!((y.ln() + 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((y.to_f64()).abs() == 0.0);
    }

    #[test]
    fn display_round_trips() {
        let x = rat(-22, 7);
        assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }
}
