//! Seeded sampling of deep dyadic rationals.
//!
//! Sample `i` of a run is drawn from its own ChaCha stream (`seed`, stream
//! `i`), so results do not depend on evaluation order or thread count.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cf::{raw_step, CfAlgorithm, Epsilon, Point};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAX_RETRIES: usize = 64;

/// RNG for sample `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform integer in `[0, 2^bits)`.
pub fn random_bits(rng: &mut impl RngCore, bits: u32) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let mut v: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    let extra = words as u32 * 32 - bits;
    if extra > 0 {
        if let Some(top) = v.last_mut() {
            *top >>= extra;
        }
    }
    BigUint::from_slice(&v)
}

/// Number of RCF steps before termination, capped at `cap`.
pub fn rcf_depth(x: &Rational, cap: usize) -> usize {
    let mut p = Point::from_rational(&x.fract());
    let mut n = 0;
    while n < cap && !p.n.is_zero() {
        let (next, d) = raw_step(&CfAlgorithm::Rcf, &p);
        n += 1;
        if d.epsilon == Epsilon::Terminal {
            break;
        }
        p = next;
    }
    n
}

#[derive(Clone, Debug)]
pub struct Sampler {
    pub seed: u64,
    pub denom_bits: u32,
    /// Draws whose RCF expansion is shorter than this are rejected.
    pub min_depth: usize,
}

#[derive(Clone, Debug)]
pub struct SampleSet {
    pub points: Vec<Rational>,
    /// Total rejected draws across all indices.
    pub rejected: usize,
}

impl Sampler {
    pub fn new(seed: u64, denom_bits: u32, min_depth: usize) -> Self {
        Sampler { seed, denom_bits, min_depth }
    }

    /// Sample `index`: `N / 2^denom_bits` with `N` uniform, together with the
    /// number of rejected draws.
    pub fn draw(&self, index: u64) -> Result<(Rational, usize)> {
        let mut rng = stream(self.seed, index);
        let den = BigUint::from(1u32) << self.denom_bits;
        for attempt in 0..MAX_RETRIES {
            let n = random_bits(&mut rng, self.denom_bits);
            if n.is_zero() {
                continue;
            }
            let x = Rational::new(n, den.clone())?;
            if rcf_depth(&x, self.min_depth) >= self.min_depth {
                return Ok((x, attempt));
            }
        }
        Err(Error::SamplingExhausted(MAX_RETRIES))
    }

    /// Samples `start..start+count`, evaluated in parallel, in index order.
    pub fn draw_range(&self, start: u64, count: usize) -> Result<SampleSet> {
        let draws: Vec<(Rational, usize)> =
            (start..start + count as u64).into_par_iter().map(|i| self.draw(i)).collect::<Result<_>>()?;
        let rejected = draws.iter().map(|d| d.1).sum();
        Ok(SampleSet { points: draws.into_iter().map(|d| d.0).collect(), rejected })
    }

    pub fn draw_many(&self, count: usize) -> Result<SampleSet> {
        self.draw_range(0, count)
    }
}
