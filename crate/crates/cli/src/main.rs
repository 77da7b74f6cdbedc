mod config;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use brjuno::cf::{convergents, expand, CfAlgorithm};
use brjuno::figures::{render, FigureId, FigureSpec};
use brjuno::fixtures::Pinned;
use brjuno::operators::{holder_norm_sequence, spectral_estimate, GridFunction, PairSchedule};
use brjuno::rational::Rational;
use brjuno::regularity::{holder_exponent, DiffKind};
use brjuno::suites::{self, SuiteConfig, SuiteName};
use brjuno::table::{Cell, Provenance, Table};

use config::{Flags, Format, RunConfig};

const DEFAULT_SEED: u64 = 1;
const EXPAND_CAP: usize = 4096;

/// Continued-fraction expansions, Brjuno-type functions and their
/// verification suites.
#[derive(Parser)]
#[command(name = "brjuno", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Digits, convergents and beta of an exact rational (`p/q` or decimal).
    Expand { x: String },
    /// Data behind a plot: B_RCF, SEMI_DIFF, B_OCF, ECF_PANEL or PHI.
    Figure { id: String },
    /// Run a verification suite; exits 1 if a gating check fails.
    Suite { name: String },
    /// Regenerate the pinned constants as JSON.
    Pin,
    /// Hölder exponent scan of a difference function (`--kind`, `--nu`).
    Scan {
        #[arg(long, default_value_t = 8)]
        j_min: u32,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
    },
    /// Per-iterate operator probes on the odd map.
    Sequence {
        #[arg(value_enum)]
        probe: Probe,
        /// Largest iterate.
        #[arg(long, default_value_t = 15)]
        m_max: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Probe {
    /// `(|T^m 1|_2 / |1|_2)^(1/m)`.
    Spectral,
    /// Hölder norms of `T^m(-log)` at `eta = nu/2`.
    HolderNorm,
}

/// Everything after the binary name, for provenance lines.
fn invocation() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn emit_table(cfg: &RunConfig, table: &Table, seed: u64, extra: Option<serde_json::Value>) -> Result<()> {
    let meta = Provenance::new(seed, invocation());
    match cfg.format(Format::Csv) {
        Format::Csv => emit(cfg, &table.to_csv(&meta)?),
        Format::Json => {
            let mut v = table.to_json(&meta);
            if let Some(serde_json::Value::Object(m)) = extra {
                v.as_object_mut().expect("object").extend(m);
            }
            emit(cfg, &(serde_json::to_string_pretty(&v)? + "\n"))
        }
    }
}

fn cmd_expand(cfg: &RunConfig, x: &str) -> Result<()> {
    let alg = cfg.algorithm(CfAlgorithm::Rcf)?;
    let x: Rational = x.parse()?;
    let orbit = expand(&alg, &x, cfg.depth.unwrap_or(EXPAND_CAP))?;
    let conv = convergents(&orbit);
    if cfg.format(Format::Csv) == Format::Json {
        return emit(cfg, &(serde_json::to_string_pretty(&json!({ "orbit": orbit, "convergents": conv }))? + "\n"));
    }
    let mut t = Table::new(["n", "a", "eps", "p", "q", "beta", "x_n"]);
    for n in 0..=conv.len() {
        let (a, e) = match n {
            0 => (String::new(), String::new()),
            _ => (conv.digits[n - 1].a.to_string(), conv.digits[n - 1].epsilon.to_string()),
        };
        t.push(vec![
            Cell::Int(n as i64),
            a.into(),
            e.into(),
            conv.p[n].to_string().into(),
            conv.q[n].to_string().into(),
            conv.beta[n].to_string().into(),
            orbit.points[n].to_string().into(),
        ]);
    }
    emit_table(cfg, &t, cfg.seed.unwrap_or(0), None)
}

fn cmd_figure(cfg: &RunConfig, id: &str) -> Result<()> {
    let id: FigureId = id.parse()?;
    let spec = FigureSpec {
        id,
        points: cfg.samples.unwrap_or(FigureSpec::DEFAULT_POINTS),
        nu: cfg.nu,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        denom_bits: cfg.denom_bits.unwrap_or(FigureSpec::DEFAULT_DENOM_BITS),
        depth: cfg.depth.unwrap_or(FigureSpec::DEFAULT_DEPTH),
    };
    let table = render(&spec)?;
    emit_table(cfg, &table, spec.seed, Some(json!({ "figure": id })))
}

fn suite_config(cfg: &RunConfig) -> Result<SuiteConfig> {
    Ok(SuiteConfig {
        seed: cfg.seed,
        samples: cfg.samples,
        depth: cfg.depth,
        denom_bits: cfg.denom_bits,
        nu: cfg.nu,
        kind: cfg.kind()?,
        pinned: cfg.fixture.as_deref().map(Pinned::load).transpose()?,
    })
}

/// Returns whether every gating check passed.
fn cmd_suite(cfg: &RunConfig, name: &str) -> Result<bool> {
    let suite: SuiteName = name.parse()?;
    let report = suites::run(suite, &suite_config(cfg)?)?;
    match cfg.format(Format::Json) {
        Format::Json => emit(cfg, &(serde_json::to_string_pretty(&report)? + "\n"))?,
        Format::Csv => {
            let mut t = Table::new(["check", "passed", "gating", "checked", "failures", "skipped", "first_failure"]);
            for c in &report.checks {
                t.push(vec![
                    c.name.clone().into(),
                    c.passed.into(),
                    c.gating.into(),
                    Cell::Int(c.checked as i64),
                    Cell::Int(c.failures as i64),
                    Cell::Int(c.skipped as i64),
                    c.first_failure.clone().unwrap_or_default().into(),
                ]);
            }
            emit_table(cfg, &t, report.seed, None)?;
        }
    }
    for c in report.failed_checks() {
        eprintln!("FAILED {}: {}", c.name, c.first_failure.as_deref().unwrap_or(""));
    }
    Ok(report.passed)
}

fn cmd_pin(cfg: &RunConfig) -> Result<()> {
    emit(cfg, &suites::pin(&suite_config(cfg)?)?.to_json())
}

fn cmd_scan(cfg: &RunConfig, j_min: u32, j_max: u32) -> Result<()> {
    let kind = cfg.kind()?.unwrap_or(DiffKind::Semi);
    let nu = cfg.nu.unwrap_or(1.0);
    let seed = cfg.seed.unwrap_or(suites::holder::DEFAULT_SEED);
    let e = holder_exponent(kind, nu, (j_min, j_max), cfg.samples.unwrap_or(suites::holder::PAIRS_PER_SCALE), seed)?;
    let mut t = Table::new(["kind", "nu", "j", "scale", "supIncrement"]);
    for (j, s) in e.scales.iter().zip(&e.sup_increments) {
        t.push(vec![kind.name().to_string().into(), nu.into(), Cell::Int(*j as i64), (-(*j as f64)).exp2().into(), (*s).into()]);
    }
    emit_table(cfg, &t, seed, Some(json!({ "eta_hat": e.eta_hat, "r2": e.r2, "used": e.used })))
}

fn cmd_sequence(cfg: &RunConfig, probe: Probe, m_max: usize) -> Result<()> {
    let alg = cfg.algorithm(CfAlgorithm::Ocf)?;
    let nu = cfg.nu.unwrap_or(1.0);
    let t = match probe {
        Probe::Spectral => {
            let one = GridFunction::constant(1.0)?;
            let mut t = Table::new(["m", "estimate"]);
            for m in 1..=m_max {
                t.push(vec![Cell::Int(m as i64), spectral_estimate(&alg, nu, &one, m, 2.0)?.value.into()]);
            }
            t
        }
        Probe::HolderNorm => {
            let schedule = PairSchedule { seed: cfg.seed.unwrap_or(PairSchedule::default().seed), ..PairSchedule::default() };
            let seq = holder_norm_sequence(&alg, nu, &GridFunction::neg_log(64)?, m_max, nu / 2.0, &schedule)?;
            let mut t = Table::new(["m", "seminorm", "sup", "estimate"]);
            for h in seq {
                t.push(vec![Cell::Int(h.m as i64), h.seminorm.into(), h.sup.into(), h.norm.into()]);
            }
            t
        }
    };
    emit_table(cfg, &t, cfg.seed.unwrap_or(DEFAULT_SEED), None)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("BRJUNO_THREADS") {
        let n: usize = v.parse().with_context(|| format!("BRJUNO_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let cfg = RunConfig::resolve(cli.flags)?;
    match cli.command {
        Command::Expand { x } => cmd_expand(&cfg, &x)?,
        Command::Figure { id } => cmd_figure(&cfg, &id)?,
        Command::Suite { name } => return cmd_suite(&cfg, &name),
        Command::Pin => cmd_pin(&cfg)?,
        Command::Scan { j_min, j_max } => cmd_scan(&cfg, j_min, j_max)?,
        Command::Sequence { probe, m_max } => cmd_sequence(&cfg, probe, m_max)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
