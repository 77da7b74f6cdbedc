//! The golden-mean constant `g = (sqrt 5 - 1)/2` and a rational bracket for
//! exact comparisons.

use crate::rational::Rational;

pub const G: f64 = 0.618_033_988_749_894_9;

/// Lower end of the bracket, `0.61803398 < g`.
pub fn g_lo() -> Rational {
    Rational::new(61_803_398, 100_000_000).unwrap()
}

/// Upper end of the bracket, `g < 0.61803399`.
pub fn g_hi() -> Rational {
    Rational::new(61_803_399, 100_000_000).unwrap()
}

/// Constant of the adjacent-branch length ratio for the odd map,
/// `(g + 2)(1/g + 1) / (g (1/g - 1))`.
pub fn c5() -> f64 {
    let gi = 1.0 / G;
    (G + 2.0) * (gi + 1.0) / (G * (gi - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_contains_g() {
        // g^2 + g - 1 changes sign across the bracket.
        let f = |r: Rational| &r * &r + r - Rational::one();
        assert!(f(g_lo()).is_negative());
        assert!(!f(g_hi()).is_negative());
        assert!((G * G + G - 1.0).abs() < 1e-15);
        assert!(g_lo().to_f64() < G && G < g_hi().to_f64());
    }
}
