//! Data behind the plots: Brjuno functions and differences on seeded random
//! points, plus one anchor row with a known value.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::CfAlgorithm;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::regularity::{diff, eval_or_zero, phi_closed, DiffKind};
use crate::sampling::Sampler;
use crate::series::SeriesParams;
use crate::table::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FigureId {
    BRcf,
    SemiDiff,
    BOcf,
    /// `B_e`, `B_oo`, `B_e + B_oo/2` and `B - (B_e + B_oo/2)`.
    EcfPanel,
    Phi,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::BRcf, FigureId::SemiDiff, FigureId::BOcf, FigureId::EcfPanel, FigureId::Phi];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::BRcf => "B_RCF",
            FigureId::SemiDiff => "SEMI_DIFF",
            FigureId::BOcf => "B_OCF",
            FigureId::EcfPanel => "ECF_PANEL",
            FigureId::Phi => "PHI",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown figure {s:?} (expected B_RCF, SEMI_DIFF, B_OCF, ECF_PANEL, PHI)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureSpec {
    pub id: FigureId,
    /// Rows emitted, the anchor included.
    pub points: usize,
    /// Exponent; `None` means 1, or both 1 and 1/2 for [`FigureId::Phi`].
    pub nu: Option<f64>,
    pub seed: u64,
    pub denom_bits: u32,
    pub depth: usize,
}

impl FigureSpec {
    pub const DEFAULT_POINTS: usize = 10_000;
    pub const DEFAULT_DENOM_BITS: u32 = 64;
    pub const DEFAULT_DEPTH: usize = 8;

    pub fn new(id: FigureId) -> Self {
        FigureSpec {
            id,
            points: Self::DEFAULT_POINTS,
            nu: None,
            seed: 1,
            denom_bits: Self::DEFAULT_DENOM_BITS,
            depth: Self::DEFAULT_DEPTH,
        }
    }

    fn nus(&self) -> Vec<f64> {
        match (self.id, self.nu) {
            (_, Some(nu)) => vec![nu],
            (FigureId::Phi, None) => vec![1.0, 0.5],
            _ => vec![1.0],
        }
    }

    /// Value column names.
    pub fn columns(&self) -> Vec<String> {
        let nus = self.nus();
        match self.id {
            FigureId::BRcf => vec!["B".into()],
            FigureId::SemiDiff => vec!["semi_diff".into()],
            FigureId::BOcf => vec!["B_o".into()],
            FigureId::EcfPanel => ["B_e", "B_oo", "B_e+B_oo/2", "B-(B_e+B_oo/2)"].map(String::from).to_vec(),
            FigureId::Phi => nus.iter().map(|nu| format!("phi_nu={nu}")).collect(),
        }
    }
}

/// `F_n / F_{n+1}`, the anchor on the golden orbit.
pub fn fibonacci_ratio(n: usize) -> Rational {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for _ in 0..n {
        (a, b) = (b.clone(), a + b);
    }
    Rational::new(a, b).expect("positive denominator")
}

fn anchor(id: FigureId) -> Rational {
    match id {
        FigureId::Phi => Rational::new(1, 2).expect("nonzero"),
        _ => fibonacci_ratio(60),
    }
}

fn values(id: FigureId, x: &Rational, nus: &[f64]) -> Result<Vec<f64>> {
    let nu = nus[0];
    let params = SeriesParams::new(nu);
    let b = |alg: &CfAlgorithm| eval_or_zero(alg, x, &params).map(|r| r.value);
    match id {
        FigureId::BRcf => Ok(vec![b(&CfAlgorithm::Rcf)?]),
        FigureId::SemiDiff => Ok(vec![diff(DiffKind::Semi, x, &params)?.value]),
        FigureId::BOcf => Ok(vec![b(&CfAlgorithm::Ocf)?]),
        FigureId::EcfPanel => {
            let (b1, be, boo) = (b(&CfAlgorithm::Rcf)?, b(&CfAlgorithm::Ecf)?, b(&CfAlgorithm::Oocf)?);
            let sum = be + boo / 2.0;
            Ok(vec![be, boo, sum, b1 - sum])
        }
        FigureId::Phi => nus.iter().map(|&nu| phi_closed(x, nu)).collect(),
    }
}

/// The figure table: columns `x`, the value columns and `ok`, rows sorted by
/// `x`. Rows whose evaluation fails carry NaN values and `ok = false`.
pub fn render(spec: &FigureSpec) -> Result<Table> {
    if spec.points == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if let Some(nu) = spec.nu {
        SeriesParams::new(nu).validate()?;
    }
    let sampler = Sampler::new(spec.seed, spec.denom_bits, spec.depth);
    let mut xs = sampler.draw_many(spec.points - 1)?.points;
    if spec.id == FigureId::Phi {
        // Phi lives on (0, 1/2].
        let half = Rational::new(1, 2)?;
        xs.iter_mut().for_each(|x| *x = &*x * &half);
    }
    xs.push(anchor(spec.id));
    xs.sort();
    let nus = spec.nus();
    let cols = spec.columns();
    let rows: Vec<Vec<Cell>> = xs
        .par_iter()
        .map(|x| {
            let (vals, ok) = match values(spec.id, x, &nus) {
                Ok(v) => (v, true),
                Err(_) => (vec![f64::NAN; cols.len()], false),
            };
            let mut row = vec![Cell::Num(x.to_f64())];
            row.extend(vals.into_iter().map(Cell::Num));
            row.push(Cell::Bool(ok));
            row
        })
        .collect();
    let mut table = Table::new(std::iter::once("x".to_string()).chain(cols).chain(["ok".to_string()]));
    table.rows = rows;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: FigureId, points: usize) -> FigureSpec {
        FigureSpec { points, ..FigureSpec::new(id) }
    }

    #[test]
    fn names_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert_eq!("ecf-panel".parse::<FigureId>().unwrap(), FigureId::EcfPanel);
        assert!("fig9".parse::<FigureId>().is_err());
    }

    #[test]
    fn golden_anchor_value() {
        let t = render(&spec(FigureId::BRcf, 20)).unwrap();
        assert_eq!(t.rows.len(), 20);
        let b = t.column("B").unwrap();
        let near = t.rows.iter().find(|r| matches!(r[0], Cell::Num(x) if (x - 0.618_033_988_75).abs() < 1e-9)).unwrap();
        // -log g / (1 - g) at the golden mean.
        assert!(matches!(near[b], Cell::Num(v) if (v - 1.259_8).abs() < 1e-3));
    }

    #[test]
    fn rows_are_sorted_and_panel_is_consistent() {
        let t = render(&spec(FigureId::EcfPanel, 12)).unwrap();
        assert_eq!(t.columns.len(), 6);
        let num = |c: &Cell| match c {
            Cell::Num(v) => *v,
            _ => panic!(),
        };
        for w in t.rows.windows(2) {
            assert!(num(&w[0][0]) <= num(&w[1][0]));
        }
        for r in &t.rows {
            assert!((num(&r[1]) + num(&r[2]) / 2.0 - num(&r[3])).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_points_stay_in_domain() {
        let t = render(&spec(FigureId::Phi, 30)).unwrap();
        assert_eq!(t.columns, ["x", "phi_nu=1", "phi_nu=0.5", "ok"]);
        assert!(t.rows.iter().all(|r| matches!(r[0], Cell::Num(x) if x > 0.0 && x <= 0.5)));
        assert!(t.rows.iter().all(|r| r[3] == Cell::Bool(true)));
    }
}
