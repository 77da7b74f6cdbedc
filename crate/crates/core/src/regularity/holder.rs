use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{diff, DiffKind};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sampling::{random_bits, rcf_depth, stream, MAX_RETRIES};
use crate::series::SeriesParams;

/// Pairs are compared exhaustively up to this many samples.
const ALL_PAIRS_LIMIT: usize = 4096;

/// `max |f(x) - f(x')| / |x - x'|^eta` over the supplied samples: all pairs
/// for small sets, otherwise neighbours at dyadic strides in sorted order.
pub fn holder_seminorm(samples: &[(Rational, f64)], eta: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples.len() });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("Hölder exponent must lie in (0, 1], got {eta}")));
    }
    let quotient = |a: &(Rational, f64), b: &(Rational, f64)| -> f64 {
        if a.0 == b.0 {
            return 0.0;
        }
        let d = (&a.0 - &b.0).abs().to_f64();
        (a.1 - b.1).abs() / d.powf(eta)
    };
    let n = samples.len();
    let mut best: f64 = 0.0;
    if n <= ALL_PAIRS_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(quotient(&samples[i], &samples[j]));
            }
        }
    } else {
        let mut sorted: Vec<&(Rational, f64)> = samples.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut stride = 1;
        while stride < n {
            for i in 0..n - stride {
                best = best.max(quotient(sorted[i], sorted[i + stride]));
            }
            stride *= 2;
        }
    }
    Ok(best)
}

/// Sampling plan for [`holder_exponent_with`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleSpec {
    pub j_min: u32,
    pub j_max: u32,
    pub samples_per_scale: usize,
    pub seed: u64,
    /// Base points have denominator `2^(j + extra_bits)`.
    pub extra_bits: u32,
    /// Both points of a pair need at least this many RCF digits.
    pub min_depth: usize,
}

impl ScaleSpec {
    pub fn new(j_min: u32, j_max: u32, samples_per_scale: usize, seed: u64) -> Self {
        ScaleSpec { j_min, j_max, samples_per_scale, seed, extra_bits: 24, min_depth: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub eta_hat: f64,
    /// Scale exponents `j` (scale `2^-j`), so the scales are decreasing.
    pub scales: Vec<u32>,
    pub sup_increments: Vec<f64>,
    /// Largest summed truncation residual of a pair at each scale.
    pub residual_floors: Vec<f64>,
    /// Scales that entered the regression.
    pub used: Vec<bool>,
    pub r2: f64,
    pub seed: u64,
    pub rejected: usize,
}

/// One pair `(x, x + 2^-j)` at scale `j`: `(|increment|, residual, rejected)`.
fn sample_pair<F>(f: &F, spec: &ScaleSpec, j: u32, i: usize) -> Result<(f64, f64, usize)>
where
    F: Fn(&Rational) -> Result<(f64, f64)>,
{
    let bits = j + spec.extra_bits;
    let den = BigUint::from(1u32) << bits;
    let offset = BigUint::from(1u32) << spec.extra_bits;
    let mut rng = stream(spec.seed, ((j as u64) << 32) | i as u64);
    for attempt in 0..MAX_RETRIES {
        let num = random_bits(&mut rng, bits);
        if num.is_zero() || &num + &offset >= den {
            continue;
        }
        let x = Rational::new(num.clone(), den.clone())?;
        let y = Rational::new(&num + &offset, den.clone())?;
        if rcf_depth(&x, spec.min_depth) < spec.min_depth || rcf_depth(&y, spec.min_depth) < spec.min_depth {
            continue;
        }
        match (f(&x), f(&y)) {
            (Ok((fx, rx)), Ok((fy, ry))) => return Ok(((fy - fx).abs(), rx + ry, attempt)),
            (Err(Error::RationalTermination), _) | (_, Err(Error::RationalTermination)) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(MAX_RETRIES))
}

/// Least-squares fit `y = a + b t`: `(b, r^2)`.
fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - mt).powi(2)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sty / stt;
    let r2 = if syy == 0.0 { 1.0 } else { (sty * sty) / (stt * syy) };
    (slope, r2)
}

/// Hölder exponent of `f` from sup increments `S_j` over random pairs
/// `(x, x + 2^-j)`: minus the slope of `log2 S_j` against `j`. `f` returns a
/// value and its truncation residual; scales with `S_j <= 10 x` residual
/// floor are left out of the fit.
pub fn holder_exponent_with<F>(f: F, spec: &ScaleSpec) -> Result<HolderEstimate>
where
    F: Fn(&Rational) -> Result<(f64, f64)> + Sync,
{
    if spec.j_min >= spec.j_max {
        return Err(Error::Domain(format!("need j_min < j_max, got {}..{}", spec.j_min, spec.j_max)));
    }
    if spec.samples_per_scale == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let scales: Vec<u32> = (spec.j_min..=spec.j_max).collect();
    let mut sup = Vec::with_capacity(scales.len());
    let mut floors = Vec::with_capacity(scales.len());
    let mut rejected = 0;
    for &j in &scales {
        let pairs: Vec<(f64, f64, usize)> = (0..spec.samples_per_scale)
            .into_par_iter()
            .map(|i| sample_pair(&f, spec, j, i))
            .collect::<Result<_>>()?;
        sup.push(pairs.iter().map(|p| p.0).fold(0.0, f64::max));
        floors.push(pairs.iter().map(|p| p.1).fold(0.0, f64::max));
        rejected += pairs.iter().map(|p| p.2).sum::<usize>();
    }
    let used: Vec<bool> = sup.iter().zip(&floors).map(|(s, fl)| *s > 10.0 * fl && *s > 0.0).collect();
    let t: Vec<f64> = scales.iter().zip(&used).filter(|p| *p.1).map(|p| *p.0 as f64).collect();
    let y: Vec<f64> = sup.iter().zip(&used).filter(|p| *p.1).map(|p| p.0.log2()).collect();
    let (eta_hat, r2) = if t.len() >= 2 {
        let (slope, r2) = linear_fit(&t, &y);
        (-slope, r2)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(HolderEstimate {
        eta_hat,
        scales,
        sup_increments: sup,
        residual_floors: floors,
        used,
        r2,
        seed: spec.seed,
        rejected,
    })
}

/// Hölder exponent of the difference function `kind`.
pub fn holder_exponent(kind: DiffKind, nu: f64, scale_range: (u32, u32), samples_per_scale: usize, seed: u64) -> Result<HolderEstimate> {
    let params = SeriesParams::new(nu);
    params.validate()?;
    let spec = ScaleSpec::new(scale_range.0, scale_range.1, samples_per_scale, seed);
    holder_exponent_with(
        |x| {
            let d = diff(kind, x, &params)?;
            Ok((d.value, d.residual))
        },
        &spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn grid(n: i64, f: impl Fn(f64) -> f64) -> Vec<(Rational, f64)> {
        (1..=n).map(|i| (rat(i, n), f(i as f64 / n as f64))).collect()
    }

    #[test]
    fn seminorm_calibration() {
        assert!((holder_seminorm(&grid(50, |x| x), 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(holder_seminorm(&grid(50, |_| 3.0), 0.5).unwrap(), 0.0);
        let s: Vec<(Rational, f64)> = (0..=64).map(|i| (rat(i, 64), (i as f64 / 64.0).sqrt())).collect();
        assert!((holder_seminorm(&s, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(holder_seminorm(&s[..1], 0.5), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn strided_schedule_on_large_sets() {
        let s = grid(5000, |x| x);
        assert!((holder_seminorm(&s, 1.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lipschitz_control_has_exponent_one() {
        let e = holder_exponent_with(|x| Ok((x.to_f64(), 0.0)), &ScaleSpec::new(8, 14, 20, 3)).unwrap();
        assert!((e.eta_hat - 1.0).abs() < 1e-9, "{e:?}");
        assert!(e.r2 > 0.999);
    }

    #[test]
    fn smooth_function_has_exponent_one() {
        let e = holder_exponent_with(|x| Ok((x.to_f64().powi(2), 0.0)), &ScaleSpec::new(8, 14, 50, 3)).unwrap();
        assert!((e.eta_hat - 1.0).abs() < 0.05, "{e:?}");
    }
}
