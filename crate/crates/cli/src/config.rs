use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use brjuno::cf::CfAlgorithm;
use brjuno::regularity::DiffKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every command. Each one overrides the same field of the
/// `--config` file.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// rcf | alpha:<a/b> | bcf | nicf | ocf | ecf | oocf
    #[arg(long, global = true)]
    pub alg: Option<String>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample count (rows for `figure`, pairs per scale for `scan`).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Minimum RCF depth of sampled points; step cap for `expand`.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub denom_bits: Option<u32>,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of: algorithm, nu, seed, samples, depth,
    /// denomBits, outputPath, format, kind, fixture.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Difference function: semi | nicf | ocf | ecf-oo
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// Pinned-constant file replacing the built-in one.
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Option<String>,
    pub nu: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub depth: Option<usize>,
    pub denom_bits: Option<u32>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub kind: Option<String>,
    pub fixture: Option<PathBuf>,
}

impl RunConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// The config file (if any) with the flags laid over it.
    pub fn resolve(flags: Flags) -> Result<Self> {
        let base = match &flags.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        let c = RunConfig {
            algorithm: flags.alg.or(base.algorithm),
            nu: flags.nu.or(base.nu),
            seed: flags.seed.or(base.seed),
            samples: flags.samples.or(base.samples),
            depth: flags.depth.or(base.depth),
            denom_bits: flags.denom_bits.or(base.denom_bits),
            output_path: flags.out.or(base.output_path),
            format: flags.format.or(base.format),
            kind: flags.kind.or(base.kind),
            fixture: flags.fixture.or(base.fixture),
        };
        if let (Some(bits), Some(depth)) = (c.denom_bits, c.depth) {
            // Below this a random rational rarely has `depth` digits.
            if (bits as usize) < 4 * depth {
                bail!("--denom-bits {bits} is below 4 x --depth {depth}");
            }
        }
        Ok(c)
    }

    pub fn algorithm(&self, default: CfAlgorithm) -> Result<CfAlgorithm> {
        match &self.algorithm {
            Some(s) => Ok(s.parse()?),
            None => Ok(default),
        }
    }

    pub fn kind(&self) -> Result<Option<DiffKind>> {
        Ok(self.kind.as_deref().map(str::parse).transpose()?)
    }

    pub fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 5, "nu": 0.5, "denomBits": 96}"#).unwrap();
        let flags = Flags { config: Some(path), seed: Some(9), ..Flags::default() };
        let c = RunConfig::resolve(flags).unwrap();
        assert_eq!((c.seed, c.nu, c.denom_bits), (Some(9), Some(0.5), Some(96)));
    }

    #[test]
    fn unknown_keys_and_shallow_bits_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"sead": 5}"#).unwrap();
        assert!(RunConfig::resolve(Flags { config: Some(path), ..Flags::default() }).is_err());
        assert!(RunConfig::resolve(Flags { denom_bits: Some(16), depth: Some(8), ..Flags::default() }).is_err());
    }
}
