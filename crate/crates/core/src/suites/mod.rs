//! Seeded invariant suites with machine-readable pass/fail reports.
//!
//! Every suite is a pure function of its [`SuiteConfig`]: samples come from
//! per-index RNG streams and results are merged in index order, so reports are
//! identical for any thread count.

pub mod boundedness;
pub mod bounds;
pub mod holder;
pub mod identities;
pub mod operators;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fixtures::Pinned;
use crate::regularity::DiffKind;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Identities,
    Bounds,
    Boundedness,
    Holder,
    Operators,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] =
        [SuiteName::Identities, SuiteName::Bounds, SuiteName::Boundedness, SuiteName::Holder, SuiteName::Operators];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Identities => "identities",
            SuiteName::Bounds => "bounds",
            SuiteName::Boundedness => "boundedness",
            SuiteName::Holder => "holder",
            SuiteName::Operators => "operators",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?} (expected identities, bounds, boundedness, holder, operators)")))
    }
}

/// Knobs shared by the suites; `None` selects the suite's own default.
#[derive(Clone, Debug, Default)]
pub struct SuiteConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub depth: Option<usize>,
    pub denom_bits: Option<u32>,
    /// Restricts suites that scan exponents to this one.
    pub nu: Option<f64>,
    /// Restricts the Hölder suite to one difference function.
    pub kind: Option<DiffKind>,
    /// Pinned constants; the embedded fixture when `None`.
    pub pinned: Option<Pinned>,
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        SuiteConfig { seed: Some(seed), ..Default::default() }
    }

    pub(crate) fn pinned(&self) -> Result<Pinned> {
        match &self.pinned {
            Some(p) => Ok(p.clone()),
            None => Pinned::embedded(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Informational checks are reported but do not decide the suite.
    pub gating: bool,
    pub checked: u64,
    pub failures: u64,
    pub skipped: u64,
    pub first_failure: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub version: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub(crate) fn new(suite: SuiteName, seed: u64, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed || !c.gating);
        SuiteReport { suite, version: VERSION, seed, passed, checks }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.gating && !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Running count for one named invariant.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub skipped: u64,
    pub first_failure: Option<String>,
}

impl Tally {
    pub fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures += other.failures;
        self.skipped += other.skipped;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            passed: self.failures == 0 && self.checked > 0,
            name: self.name,
            gating: true,
            checked: self.checked,
            failures: self.failures,
            skipped: self.skipped,
            first_failure: self.first_failure,
            detail: Value::Null,
        }
    }
}

/// Tallies keyed by name, kept in first-use order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tallies(Vec<Tally>);

impl Tallies {
    pub fn get(&mut self, name: &str) -> &mut Tally {
        match self.0.iter().position(|t| t.name == name) {
            Some(i) => &mut self.0[i],
            None => {
                self.0.push(Tally { name: name.to_string(), ..Default::default() });
                self.0.last_mut().expect("just pushed")
            }
        }
    }

    /// Folds `other` in; earlier tallies keep their first failure.
    pub fn merge(&mut self, other: Tallies) {
        for t in other.0 {
            let name = t.name.clone();
            self.get(&name).merge(t);
        }
    }

    pub fn finish(self) -> Vec<CheckResult> {
        self.0.into_iter().map(Tally::finish).collect()
    }
}

/// A check decided by a single comparison.
pub(crate) fn single(name: impl Into<String>, passed: bool, gating: bool, detail: Value) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        gating,
        checked: 1,
        failures: u64::from(!passed),
        skipped: 0,
        first_failure: (!passed).then(|| detail.to_string()),
        detail,
    }
}

/// A check that could not be evaluated at all.
pub(crate) fn errored(name: impl Into<String>, gating: bool, e: &Error) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: false,
        gating,
        checked: 0,
        failures: 1,
        skipped: 0,
        first_failure: Some(e.to_string()),
        detail: Value::Null,
    }
}

pub fn run(suite: SuiteName, config: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        SuiteName::Identities => identities::run(config),
        SuiteName::Bounds => bounds::run(config),
        SuiteName::Boundedness => boundedness::run(config),
        SuiteName::Holder => holder::run(config),
        SuiteName::Operators => operators::run(config),
    }
}

/// Regenerates the pinned constants; unset fields take the boundedness
/// defaults.
pub fn pin(config: &SuiteConfig) -> Result<Pinned> {
    let seed = config.seed.unwrap_or(boundedness::DEFAULT_SEED);
    let samples = config.samples.unwrap_or(boundedness::DEFAULT_SAMPLES);
    let denom_bits = config.denom_bits.unwrap_or(boundedness::DEFAULT_DENOM_BITS);
    let mut constants = boundedness::pin_constants(seed, samples, denom_bits)?;
    constants.extend(operators::pin_constants()?);
    Ok(Pinned { version: VERSION.to_string(), seed, samples, denom_bits, constants })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tallies_keep_order_and_first_failure() {
        let mut a = Tallies::default();
        a.get("x").record(true, || unreachable!());
        a.get("y").record(false, || "first".into());
        let mut b = Tallies::default();
        b.get("y").record(false, || "second".into());
        b.get("z").skip();
        a.merge(b);
        let r = a.finish();
        assert_eq!(r.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["x", "y", "z"]);
        assert_eq!(r[1].failures, 2);
        assert_eq!(r[1].first_failure.as_deref(), Some("first"));
        assert!(r[0].passed && !r[1].passed);
        // Nothing checked is not a pass.
        assert!(!r[2].passed);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in SuiteName::ALL {
            assert_eq!(s.name().parse::<SuiteName>().unwrap(), s);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }
}
