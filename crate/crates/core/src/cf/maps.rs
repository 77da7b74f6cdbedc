use super::{step, CfAlgorithm};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `iota(x) = (1 - x)/(1 + x)`, the involution conjugating ECF and OOCF.
pub fn iota(x: &Rational) -> Result<Rational> {
    if x.is_negative() || *x > 1 {
        return Err(Error::Domain(format!("iota is defined on [0, 1], got {x}")));
    }
    let one = Rational::one();
    Ok((&one - x) / (one + x))
}

/// Jump transformation of the backward map: `m = min{n >= 0 : A_0^n(x) < 1/2}`
/// and `F_j(x) = A_0^{m+1}(x)`.
pub fn jump_bcf(x: &Rational, max_depth: usize) -> Result<(usize, Rational)> {
    if !x.is_positive_open_unit() {
        return Err(Error::Domain(format!("jump transformation needs x in (0, 1), got {x}")));
    }
    let bcf = CfAlgorithm::bcf();
    let half = Rational::new(1, 2)?;
    let mut y = x.clone();
    for m in 0..=max_depth {
        if y < half {
            if y.is_zero() {
                return Err(Error::Terminal(format!("the backward orbit of {x} reaches 0 at step {m}")));
            }
            return Ok((m, step(&bcf, &y)?.0));
        }
        y = step(&bcf, &y)?.0;
    }
    Err(Error::DepthExceeded { requested: max_depth, reached: max_depth })
}

impl Rational {
    pub(crate) fn is_positive_open_unit(&self) -> bool {
        !self.is_negative() && !self.is_zero() && *self < 1
    }
}
