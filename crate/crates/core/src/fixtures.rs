//! Pinned empirical constants with the run that produced them.
//!
//! Boundedness results give existence of constants, not their values, so
//! regression checks compare against numbers frozen here.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../fixtures/pinned.json");

/// Relative tolerance for agreement with a pinned constant.
pub const PIN_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinnedConstant {
    pub probe: String,
    pub nu: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pinned {
    /// Library version that generated the file.
    pub version: String,
    pub seed: u64,
    pub samples: usize,
    pub denom_bits: u32,
    pub constants: Vec<PinnedConstant>,
}

impl Pinned {
    pub fn embedded() -> Result<Self> {
        Self::from_json(EMBEDDED)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Fixture(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn get(&self, probe: &str, nu: f64) -> Option<f64> {
        self.constants.iter().find(|c| c.probe == probe && c.nu == nu).map(|c| c.value)
    }

    /// Whether `value` is within [`PIN_TOLERANCE`] of the pinned constant.
    pub fn agrees(pinned: f64, value: f64) -> bool {
        (value - pinned).abs() <= PIN_TOLERANCE * pinned.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixture_parses_and_round_trips() {
        let p = Pinned::embedded().unwrap();
        assert_eq!(Pinned::from_json(&p.to_json()).unwrap(), p);
        assert!(Pinned::from_json("{").is_err());
    }

    #[test]
    fn agreement_is_relative() {
        assert!(Pinned::agrees(2.0, 2.29));
        assert!(!Pinned::agrees(2.0, 2.31));
        assert!(!Pinned::agrees(2.0, 1.69));
    }
}
