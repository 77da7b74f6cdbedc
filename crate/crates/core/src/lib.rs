//! Exact continued-fraction engines (RCF, alpha-CF, OCF, ECF, OOCF), the
//! associated Brjuno-type series, regularity diagnostics of their
//! differences, and transfer-operator probes.

pub mod cf;
pub mod error;
pub mod figures;
pub mod fixtures;
pub mod golden;
pub mod operators;
pub mod rational;
pub mod regularity;
pub mod sampling;
pub mod series;
pub mod suites;
pub mod table;

pub use error::{Error, Result};
pub use rational::Rational;
