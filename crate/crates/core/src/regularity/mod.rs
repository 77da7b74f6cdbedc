//! Differences of Brjuno functions, the closed form of the semi-Brjuno
//! remainder `Phi`, odd-map branch geometry, and Hölder estimates.

mod branch;
mod holder;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cf::{jump_bcf, step, CfAlgorithm};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::series::{brjuno, SeriesParams, SeriesResult};

pub use branch::{branch, adjacent_branches, splitting_number, BranchInterval, SplitCase, Splitting};
pub use holder::{holder_exponent, holder_exponent_with, holder_seminorm, HolderEstimate, ScaleSpec};

/// Term budget for maps with an indifferent fixed point, whose orbits linger.
pub const INDIFFERENT_MAX_TERMS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DiffKind {
    /// `B_1(x) - [B_0(x) + B_0(-x)]`.
    Semi,
    /// `B_1 - B_{1/2}`.
    Nicf,
    /// `B_1 - B_o`.
    OcfDiff,
    /// `B_1 - [B_e + B_oo / 2]`.
    EcfOo,
}

impl DiffKind {
    pub const ALL: [DiffKind; 4] = [DiffKind::Semi, DiffKind::Nicf, DiffKind::OcfDiff, DiffKind::EcfOo];

    pub fn name(self) -> &'static str {
        match self {
            DiffKind::Semi => "semi",
            DiffKind::Nicf => "nicf",
            DiffKind::OcfDiff => "ocf",
            DiffKind::EcfOo => "ecf-oo",
        }
    }
}

impl fmt::Display for DiffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "semi" => Ok(DiffKind::Semi),
            "nicf" => Ok(DiffKind::Nicf),
            "ocf" | "ocf-diff" => Ok(DiffKind::OcfDiff),
            "ecf-oo" | "ecfoo" => Ok(DiffKind::EcfOo),
            _ => Err(Error::Parse(format!("unknown difference kind {s:?} (expected semi, nicf, ocf, ecf-oo)"))),
        }
    }
}

/// Series parameters for `alg`, raising the term budget for indifferent maps.
pub fn params_for(alg: &CfAlgorithm, params: &SeriesParams) -> SeriesParams {
    if alg.is_indifferent() {
        params.clone().with_max_terms(params.max_terms.max(INDIFFERENT_MAX_TERMS))
    } else {
        params.clone()
    }
}

/// `B` of `alg` at `x`, with the empty sum at points whose orbit is trivial.
pub(crate) fn eval_or_zero(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<SeriesResult> {
    match brjuno(alg, x, &params_for(alg, params)) {
        Err(Error::RationalTermination) => Ok(SeriesResult {
            value: 0.0,
            terms_used: 0,
            residual_estimate: 0.0,
            orbit_terminated: true,
            residual_rigorous: true,
        }),
        r => r,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiffValue {
    pub value: f64,
    /// Sum of the residual estimates of the constituent series.
    pub residual: f64,
}

/// The difference function `kind` at `x`.
pub fn diff(kind: DiffKind, x: &Rational, params: &SeriesParams) -> Result<DiffValue> {
    params.validate()?;
    let b1 = brjuno(&CfAlgorithm::Rcf, x, params)?;
    let parts: Vec<(f64, SeriesResult)> = match kind {
        DiffKind::Semi => {
            let bcf = CfAlgorithm::bcf();
            let frac = x.fract();
            vec![
                (1.0, eval_or_zero(&bcf, &frac, params)?),
                (1.0, eval_or_zero(&bcf, &(Rational::one() - frac), params)?),
            ]
        }
        DiffKind::Nicf => vec![(1.0, eval_or_zero(&CfAlgorithm::nicf(), x, params)?)],
        DiffKind::OcfDiff => vec![(1.0, eval_or_zero(&CfAlgorithm::Ocf, x, params)?)],
        DiffKind::EcfOo => vec![
            (1.0, eval_or_zero(&CfAlgorithm::Ecf, x, params)?),
            (0.5, eval_or_zero(&CfAlgorithm::Oocf, x, params)?),
        ],
    };
    let mut value = b1.value;
    let mut residual = b1.residual_estimate;
    for (w, r) in parts {
        value -= w * r.value;
        residual += w * r.residual_estimate;
    }
    Ok(DiffValue { value, residual })
}

fn check_phi_domain(x: &Rational) -> Result<()> {
    if x.is_negative() || x.is_zero() || *x > Rational::new(1, 2)? {
        return Err(Error::Domain(format!("Phi is defined on (0, 1/2], got {x}")));
    }
    Ok(())
}

/// Beyond this `floor(1/x)` the finite sum in [`phi_closed`] is replaced by
/// its integral asymptotics.
pub const PHI_EXACT_SUM_LIMIT: u64 = 1 << 24;

/// Closed form of `Phi(x) = x^nu B_0(1 - A_0 x) - B_0(1 - x)` on `(0, 1/2]`,
/// with `n = floor(1/x)`:
/// `((1-(n-1)x)^nu - x^nu) log(1-nx) + x^nu log x
///  + sum_{k=1}^{n-1} ((1-(k-1)x)^nu - (1-kx)^nu) log(1-kx)`.
/// The first term is 0 at `x = 1/n`.
pub fn phi_closed(x: &Rational, nu: f64) -> Result<f64> {
    check_phi_domain(x)?;
    let n_big = x.recip()?.floor();
    let xf = x.to_f64();
    let xnu = x.powf(nu);
    // r = 1 - n x, exact.
    let r = Rational::one() - x * Rational::from_integer(n_big.clone());
    let rf = r.to_f64();
    let h = if r.is_zero() {
        0.0
    } else {
        let y = rf + xf; // 1 - (n-1)x
        (y.powf(nu) - xnu) * rf.ln()
    };
    let n: Option<u64> = (&n_big).try_into().ok();
    let g = match n {
        Some(n) if n <= PHI_EXACT_SUM_LIMIT => {
            // y_k = 1 - kx = r + (n-k)x keeps full relative precision.
            let mut acc = 0.0;
            for k in 1..n {
                let yk = rf + (n - k) as f64 * xf;
                // y_{k-1}^nu - y_k^nu = y_k^nu (exp(nu log1p(x/y_k)) - 1).
                let dy = yk.powf(nu) * (nu * (xf / yk).ln_1p()).exp_m1();
                acc += dy * yk.ln();
            }
            acc
        }
        _ => {
            if r.is_zero() {
                -1.0 / nu
            } else {
                let rn = rf.powf(nu);
                -rn * rf.ln() + rn / nu - 1.0 / nu
            }
        }
    };
    Ok(h + g + xnu * xf.ln())
}

/// `Phi` straight from its definition with BCF series; empty sums at
/// terminal points.
pub fn phi_def(x: &Rational, nu: f64, params: &SeriesParams) -> Result<f64> {
    check_phi_domain(x)?;
    let p = SeriesParams { nu, ..params.clone() };
    p.validate()?;
    let bcf = CfAlgorithm::bcf();
    let one = Rational::one();
    let a0x = step(&bcf, x)?.0;
    let left = eval_or_zero(&bcf, &(&one - a0x), &p)?.value;
    let right = eval_or_zero(&bcf, &(&one - x), &p)?.value;
    Ok(x.powf(nu) * left - right)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiCheck {
    pub m: usize,
    /// `-sum_{k=0}^{m} (kx-(k-1))^nu log(((k+1)x-k)/(kx-(k-1)))`.
    pub closed: f64,
    /// `B_0(x) - (x A_0 x ... A_0^m x)^nu B_0(F_j x)`.
    pub series: f64,
}

/// Both expressions for the jump-transformation remainder `psi(x)`.
pub fn psi(x: &Rational, nu: f64, params: &SeriesParams) -> Result<PsiCheck> {
    let p = SeriesParams { nu, ..params.clone() };
    p.validate()?;
    let (m, fj) = jump_bcf(x, INDIFFERENT_MAX_TERMS)?;
    let mut closed = 0.0;
    let mut product = Rational::one();
    let bcf = CfAlgorithm::bcf();
    let mut y = x.clone();
    for k in 0..=m {
        let kk = Rational::from_integer(k as i64);
        let den = &kk * x - (&kk - Rational::one());
        let num = (&kk + Rational::one()) * x - &kk;
        closed -= den.powf(nu) * (num / &den).ln();
        product = product * &y;
        if k < m {
            y = step(&bcf, &y)?.0;
        }
    }
    let series = eval_or_zero(&bcf, x, &p)?.value - product.powf(nu) * eval_or_zero(&bcf, &fj, &p)?.value;
    Ok(PsiCheck { m, closed, series })
}
