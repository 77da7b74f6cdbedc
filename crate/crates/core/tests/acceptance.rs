//! End-to-end acceptance run: one line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use brjuno::figures::{render, FigureId, FigureSpec};
use brjuno::rational::Rational;
use brjuno::regularity::{phi_closed, phi_def};
use brjuno::series::SeriesParams;
use brjuno::suites::{self, SuiteConfig, SuiteName, SuiteReport};
use brjuno::table::{Cell, Provenance};

struct Outcome {
    passed: bool,
    note: String,
}

fn suite_outcome(report: &SuiteReport) -> Outcome {
    let gating = report.checks.iter().filter(|c| c.gating).count();
    let failed: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
    let note = if failed.is_empty() {
        format!("{gating} gating checks")
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Outcome { passed: report.passed, note }
}

fn identities() -> Outcome {
    let cfg = SuiteConfig { samples: Some(1000), denom_bits: Some(200), depth: Some(40), ..SuiteConfig::with_seed(7) };
    let r = suites::run(SuiteName::Identities, &cfg).expect("identity suite runs");
    let mut o = suite_outcome(&r);
    let exceptions: u64 = r.checks.iter().map(|c| c.failures).sum();
    let checked: u64 = r.checks.iter().map(|c| c.checked).sum();
    o.passed &= exceptions == 0;
    o.note = format!("{checked} exact checks, {exceptions} exceptions; {}", o.note);
    o
}

fn bounds() -> Outcome {
    let r = suites::run(SuiteName::Bounds, &SuiteConfig::default()).expect("bound suite runs");
    let mut o = suite_outcome(&r);
    let steps = r.check("orbit-steps").map(|c| c.detail["ocf_steps"].clone()).unwrap_or_default();
    let violations: u64 = r.checks.iter().map(|c| c.failures).sum();
    o.passed &= violations == 0;
    o.note = format!("{steps} orbit steps, {violations} violations; {}", o.note);
    o
}

fn oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..=1000i64 {
        // Interior grid of (0, 1/2), offset off the removable points 1/n.
        let x = Rational::new(2 * i - 1, 4002).expect("nonzero");
        for nu in [0.5, 1.0, 2.0] {
            let c = phi_closed(&x, nu).expect("closed form");
            let d = phi_def(&x, nu, &SeriesParams::new(nu)).expect("definition");
            worst = worst.max((c - d).abs());
        }
    }
    let half = Rational::new(1, 2).expect("nonzero");
    let at_half = [0.5, 1.0, 2.0].iter().map(|&nu| (phi_closed(&half, nu).expect("closed form") + 2f64.ln()).abs()).fold(0.0, f64::max);
    let x = Rational::new(1, 1u64 << 20).expect("nonzero");
    let limit = phi_closed(&x, 1.0).expect("closed form") - x.to_f64() * x.ln();
    Outcome {
        passed: worst <= 1e-6 && at_half <= 1e-9 && (limit + 1.0).abs() <= 1e-3,
        note: format!("max |closed - def| = {worst:.2e}, |Phi(1/2) + log 2| = {at_half:.2e}, limit = {limit:.6}"),
    }
}

fn boundedness() -> Outcome {
    let r = suites::run(SuiteName::Boundedness, &SuiteConfig::default()).expect("boundedness suite runs");
    let mut o = suite_outcome(&r);
    let worst = r
        .checks
        .iter()
        .filter(|c| c.gating && c.name.ends_with("/doubling"))
        .filter_map(|c| c.detail["growth"].as_f64())
        .fold(0.0, f64::max);
    o.note = format!("worst gating growth {worst:.3}; {}", o.note);
    o
}

fn holder() -> Outcome {
    let r = suites::run(SuiteName::Holder, &SuiteConfig::default()).expect("holder suite runs");
    let mut o = suite_outcome(&r);
    let etas: Vec<String> = r
        .checks
        .iter()
        .filter(|c| c.gating)
        .map(|c| format!("{} {:.3}", c.name, c.detail["eta_hat"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    o.note = format!("{}; {}", etas.join(", "), o.note);
    o
}

fn operators() -> Outcome {
    let r = suites::run(SuiteName::Operators, &SuiteConfig::default()).expect("operator suite runs");
    let mut o = suite_outcome(&r);
    let rho = r.check("spectral/ocf@nu=1").and_then(|c| c.detail["value"].as_f64()).unwrap_or(f64::NAN);
    o.note = format!("spectral estimate {rho:.4}; {}", o.note);
    o
}

fn num(c: &Cell) -> f64 {
    match c {
        Cell::Num(v) => *v,
        _ => f64::NAN,
    }
}

fn figures() -> Outcome {
    let mut passed = true;
    let mut notes = Vec::new();
    for id in FigureId::ALL {
        let spec = FigureSpec::new(id);
        let meta = Provenance::new(spec.seed, format!("figure {id}"));
        let first = render(&spec).and_then(|t| Ok((t.to_csv(&meta)?, t)));
        let second = render(&spec).and_then(|t| t.to_csv(&meta));
        let (csv, table) = match (first, second) {
            (Ok((a, t)), Ok(b)) => {
                if a != b {
                    passed = false;
                    notes.push(format!("{id} differs between runs"));
                }
                (a, t)
            }
            _ => {
                passed = false;
                notes.push(format!("{id} failed to render"));
                continue;
            }
        };
        let ok_col = table.column("ok").expect("ok column");
        let bad = table.rows.iter().filter(|r| r[ok_col] != Cell::Bool(true)).count();
        passed &= table.rows.len() == spec.points && csv.ends_with('\n');
        match id {
            FigureId::BRcf => {
                let b = table.column("B").expect("B column");
                let spot = table.rows.iter().find(|r| (num(&r[0]) - 0.618_034).abs() < 1e-5).map(|r| num(&r[b]));
                let ok = spot.is_some_and(|v| (v - 1.2598).abs() <= 1e-3);
                passed &= ok;
                notes.push(format!("B(0.618) = {:.5}", spot.unwrap_or(f64::NAN)));
            }
            FigureId::Phi => {
                let spot = table.rows.iter().find(|r| num(&r[0]) == 0.5).map(|r| (num(&r[1]), num(&r[2])));
                let ok = spot.is_some_and(|(a, b)| (a + 2f64.ln()).abs() <= 1e-3 && (b + 2f64.ln()).abs() <= 1e-3);
                passed &= ok;
                notes.push(format!("Phi(0.5) = {:.5}", spot.map_or(f64::NAN, |s| s.0)));
            }
            _ => {}
        }
        if bad > 0 {
            notes.push(format!("{id}: {bad} rows flagged"));
        }
    }
    Outcome { passed, note: format!("5 figures x 10^4 rows, byte-identical reruns; {}", notes.join(", ")) }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 7] = [
        (1, "exact identities", Duration::from_secs(120), identities),
        (2, "golden-ratio bounds", Duration::from_secs(60), bounds),
        (3, "Phi oracle equivalence", Duration::from_secs(600), oracle),
        (4, "boundedness probes", Duration::from_secs(600), boundedness),
        (5, "Hölder exponents", Duration::from_secs(600), holder),
        (6, "operator probes", Duration::from_secs(600), operators),
        (7, "figure regeneration", Duration::from_secs(600), figures),
    ];
    let mut all = true;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let passed = o.passed && took <= budget;
        all &= passed;
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("criterion {n} ({name}): {verdict} in {:.1}s (budget {}s): {}", took.as_secs_f64(), budget.as_secs(), o.note);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
