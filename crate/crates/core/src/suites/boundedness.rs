//! Empirical sup probes of differences that are bounded uniformly in `x`.
//!
//! A probe passes when its sup over `N` samples changes by less than 10%
//! once the sample doubles, and agrees with the pinned constant. Probes whose
//! boundedness is not established are run as informational checks.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{single, CheckResult, SuiteConfig, SuiteName, SuiteReport};
use crate::cf::CfAlgorithm;
use crate::error::Result;
use crate::fixtures::{Pinned, PinnedConstant};
use crate::rational::Rational;
use crate::regularity::{eval_or_zero, params_for};
use crate::sampling::Sampler;
use crate::series::{digit_class_sums, logq_class_sums, logq_series, rcf_parity_split, SeriesParams};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_DENOM_BITS: u32 = 64;
pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_NUS: [f64; 2] = [0.5, 1.0];
/// Largest relative growth of the sup when the sample doubles.
pub const DOUBLING_TOLERANCE: f64 = 0.10;

/// Every series a probe may need, at one point and one exponent.
#[derive(Clone, Debug, Default)]
pub struct Values {
    pub b1: f64,
    pub b0: f64,
    pub b0_reflected: f64,
    pub b_nicf: f64,
    pub b_o: f64,
    pub b_e: f64,
    pub b_e_star: f64,
    pub b_e_star_star: f64,
    pub b_oo: f64,
    pub b_oo_star: f64,
    pub b_oo_star_star: f64,
    pub logq_rcf: f64,
    pub logq_rcf_inf: f64,
    pub logq_rcf_one: f64,
    pub logq_o: f64,
    pub logq_e: f64,
    pub logq_e_star_star: f64,
    pub logq_oo: f64,
    pub logq_oo_star_star: f64,
}

impl Values {
    pub fn at(x: &Rational, nu: f64) -> Result<Self> {
        let p = SeriesParams::new(nu);
        let b = |alg: &CfAlgorithm, y: &Rational| eval_or_zero(alg, y, &p).map(|r| r.value);
        let (ecf, oocf) = (CfAlgorithm::Ecf, CfAlgorithm::Oocf);
        let (pe, poo) = (params_for(&ecf, &p), params_for(&oocf, &p));
        let e = digit_class_sums(&ecf, x, &pe)?;
        let oo = digit_class_sums(&oocf, x, &poo)?;
        let le = logq_class_sums(&ecf, x, &pe)?;
        let loo = logq_class_sums(&oocf, x, &poo)?;
        let split = rcf_parity_split(x, &p)?;
        Ok(Values {
            b1: b(&CfAlgorithm::Rcf, x)?,
            b0: b(&CfAlgorithm::bcf(), x)?,
            b0_reflected: b(&CfAlgorithm::bcf(), &(Rational::one() - x))?,
            b_nicf: b(&CfAlgorithm::nicf(), x)?,
            b_o: b(&CfAlgorithm::Ocf, x)?,
            b_e: e.total.value,
            b_e_star: e.star,
            b_e_star_star: e.star_star,
            b_oo: oo.total.value,
            b_oo_star: oo.star,
            b_oo_star_star: oo.star_star,
            logq_rcf: split.total,
            logq_rcf_inf: split.inf_rational,
            logq_rcf_one: split.one_rational,
            logq_o: logq_series(&CfAlgorithm::Ocf, x, &p)?.value,
            logq_e: le.total.value,
            logq_e_star_star: le.star_star,
            logq_oo: loo.total.value,
            logq_oo_star_star: loo.star_star,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Criterion {
    /// Sup stable under doubling and equal to the pinned constant.
    Pinned,
    /// Sup below a fixed bound.
    Ceiling(f64),
    /// Sup stability reported only.
    Informational,
}

#[derive(Clone, Copy, Debug)]
pub struct Probe {
    pub name: &'static str,
    pub description: &'static str,
    pub criterion: Criterion,
    pub eval: fn(&Values) -> f64,
}

pub const PROBES: &[Probe] = &[
    Probe {
        name: "semi",
        description: "B_1 - [B_0(x) + B_0(1-x)]",
        criterion: Criterion::Pinned,
        eval: |v| v.b1 - (v.b0 + v.b0_reflected),
    },
    Probe { name: "nicf", description: "B_1 - B_1/2", criterion: Criterion::Pinned, eval: |v| v.b1 - v.b_nicf },
    Probe { name: "ocf", description: "B_1 - B_o", criterion: Criterion::Pinned, eval: |v| v.b1 - v.b_o },
    Probe {
        name: "ecf-oo",
        description: "B_1 - [B_e + B_oo/2]",
        criterion: Criterion::Pinned,
        eval: |v| v.b1 - (v.b_e + 0.5 * v.b_oo),
    },
    Probe {
        name: "b1-logq",
        description: "B_1 - sum log Q_{n+1}/Q_n^nu",
        criterion: Criterion::Pinned,
        eval: |v| v.b1 - v.logq_rcf,
    },
    Probe {
        name: "logq-rcf-ocf",
        description: "sum log Q_{n+1}/Q_n^nu - sum log q^o_{n+1}/(q^o_n)^nu",
        criterion: Criterion::Pinned,
        eval: |v| v.logq_rcf - v.logq_o,
    },
    Probe {
        name: "bo-logq",
        description: "B_o - sum log q^o_{n+1}/(q^o_n)^nu",
        criterion: Criterion::Pinned,
        eval: |v| v.b_o - v.logq_o,
    },
    Probe {
        name: "be-logq-ss",
        description: "B_e - log-denominator sum, both over x^e_n in (0, 1/3]",
        criterion: Criterion::Pinned,
        eval: |v| v.b_e_star_star - v.logq_e_star_star,
    },
    Probe {
        name: "boo-logq-ss",
        description: "B_oo/2 - log-denominator sum, both over x^oo_n in [1/2, 1]",
        criterion: Criterion::Pinned,
        eval: |v| 0.5 * v.b_oo_star_star - v.logq_oo_star_star,
    },
    Probe {
        name: "be-star",
        description: "B_e over x^e_n in (1/3, 1]",
        criterion: Criterion::Ceiling(3.0),
        eval: |v| v.b_e_star,
    },
    Probe {
        name: "boo-star",
        description: "B_oo over x^oo_n in [0, 1/2)",
        criterion: Criterion::Ceiling(6.0),
        eval: |v| v.b_oo_star,
    },
    Probe {
        name: "be-logq",
        description: "B_e - sum log q^e_{n+1}/(q^e_n)^nu",
        criterion: Criterion::Informational,
        eval: |v| v.b_e - v.logq_e,
    },
    Probe {
        name: "boo-logq",
        description: "B_oo/2 - sum log q^oo_{n+1}/(q^oo_n)^nu",
        criterion: Criterion::Informational,
        eval: |v| 0.5 * v.b_oo - v.logq_oo,
    },
    Probe {
        name: "logq-e-inf-rational",
        description: "sum over q^e - RCF sum over infinity-rational P_n/Q_n",
        criterion: Criterion::Informational,
        eval: |v| v.logq_e - v.logq_rcf_inf,
    },
    Probe {
        name: "logq-oo-one-rational",
        description: "sum over q^oo - RCF sum over 1-rational P_n/Q_n",
        criterion: Criterion::Informational,
        eval: |v| v.logq_oo - v.logq_rcf_one,
    },
];

pub fn probe(name: &str) -> Option<&'static Probe> {
    PROBES.iter().find(|p| p.name == name)
}

/// Sups of `|probe|` over the first `n` and all `2n` samples, with the
/// sample where the larger one is attained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupPair {
    pub sup_n: f64,
    pub sup_2n: f64,
    pub argmax: String,
}

impl SupPair {
    pub fn growth(&self) -> f64 {
        if self.sup_n == 0.0 {
            if self.sup_2n == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.sup_2n / self.sup_n - 1.0
        }
    }
}

fn sup_pair(points: &[Rational], values: &[Values], n: usize, eval: fn(&Values) -> f64) -> SupPair {
    let abs: Vec<f64> = values.iter().map(|v| eval(v).abs()).collect();
    let sup_n = abs[..n].iter().copied().fold(0.0, f64::max);
    let (mut best, mut at) = (0.0, 0);
    for (i, &a) in abs.iter().enumerate() {
        if a > best || a.is_nan() {
            best = a;
            at = i;
        }
    }
    SupPair { sup_n, sup_2n: best, argmax: points[at].to_string() }
}

struct Scan {
    points: Vec<Rational>,
    values: Vec<Values>,
    n: usize,
}

fn scan(seed: u64, samples: usize, denom_bits: u32, depth: usize, nu: f64) -> Result<Scan> {
    let points = Sampler::new(seed, denom_bits, depth).draw_many(2 * samples)?.points;
    let values = points.par_iter().map(|x| Values::at(x, nu)).collect::<Result<Vec<_>>>()?;
    Ok(Scan { points, values, n: samples })
}

fn nus(config: &SuiteConfig) -> Vec<f64> {
    match config.nu {
        Some(nu) => vec![nu],
        None => DEFAULT_NUS.to_vec(),
    }
}

fn probe_checks(p: &Probe, nu: f64, s: &SupPair, pinned: &Pinned) -> Vec<CheckResult> {
    let label = format!("{}@nu={nu}", p.name);
    let growth = s.growth();
    let stable = growth < DOUBLING_TOLERANCE;
    let base = json!({
        "description": p.description,
        "sup_n": s.sup_n,
        "sup_2n": s.sup_2n,
        "growth": growth,
        "argmax": s.argmax,
    });
    match p.criterion {
        Criterion::Pinned => {
            let mut checks = vec![single(format!("{label}/doubling"), stable, true, base)];
            let pin = pinned.get(p.name, nu);
            let agrees = pin.is_some_and(|c| Pinned::agrees(c, s.sup_n));
            checks.push(single(
                format!("{label}/pinned"),
                agrees,
                true,
                json!({ "sup_n": s.sup_n, "pinned": pin, "fixture_seed": pinned.seed, "fixture_samples": pinned.samples }),
            ));
            checks
        }
        Criterion::Ceiling(bound) => {
            let mut detail = base;
            detail["bound"] = json!(bound);
            vec![single(format!("{label}/ceiling"), s.sup_2n < bound, true, detail)]
        }
        Criterion::Informational => vec![single(format!("{label}/doubling"), stable, false, base)],
    }
}

pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let bits = config.denom_bits.unwrap_or(DEFAULT_DENOM_BITS);
    let depth = config.depth.unwrap_or(DEFAULT_DEPTH);
    let pinned = config.pinned()?;
    let mut checks = Vec::new();
    for nu in nus(config) {
        let s = scan(seed, samples, bits, depth, nu)?;
        for p in PROBES {
            let sp = sup_pair(&s.points, &s.values, s.n, p.eval);
            checks.extend(probe_checks(p, nu, &sp, &pinned));
        }
    }
    Ok(SuiteReport::new(SuiteName::Boundedness, seed, checks))
}

/// Sups over the first `samples` points of every pinned probe.
pub fn pin_constants(seed: u64, samples: usize, denom_bits: u32) -> Result<Vec<PinnedConstant>> {
    let mut out = Vec::new();
    for nu in DEFAULT_NUS {
        let s = scan(seed, samples, denom_bits, DEFAULT_DEPTH, nu)?;
        for p in PROBES.iter().filter(|p| p.criterion == Criterion::Pinned) {
            let sp = sup_pair(&s.points, &s.values, s.n, p.eval);
            out.push(PinnedConstant { probe: p.name.to_string(), nu, value: sp.sup_n });
        }
    }
    Ok(out)
}
