//! Acceptance gate: one pass/fail line per criterion, nonzero exit if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use aho_verify::{render_report, run_all, SuiteResult, SUITES};

/// Wall-clock budgets, in seconds, for the suites that have one.
fn budget(id: u32) -> Option<f64> {
    match id {
        1 => Some(5.0),
        2 => Some(30.0),
        9 => Some(10.0),
        _ => None,
    }
}

fn failing_checks(r: &SuiteResult) -> String {
    let bad: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({})", c.label, c.detail))
        .collect();
    if bad.is_empty() {
        format!("{} checks", r.checks.len())
    } else {
        format!(
            "{} of {} checks failed: {}",
            bad.len(),
            r.checks.len(),
            bad.join("; ")
        )
    }
}

fn main() -> ExitCode {
    let mut all = true;
    for (id, suite) in SUITES {
        let start = Instant::now();
        let r = suite();
        let elapsed: Duration = start.elapsed();
        let mut pass = r.pass();
        let mut timing = format!("{:.2}s", elapsed.as_secs_f64());
        if let Some(limit) = budget(id) {
            let within = elapsed.as_secs_f64() < limit;
            pass &= within;
            timing = format!(
                "{timing}, budget {limit}s{}",
                if within { "" } else { " EXCEEDED" }
            );
        }
        all &= pass;
        println!(
            "criterion {id}: {} {} [{timing}] {}",
            if pass { "PASS" } else { "FAIL" },
            r.title,
            failing_checks(&r)
        );
    }
    let (a, b) = (render_report(&run_all()), render_report(&run_all()));
    let det = (a == b, format!("{} bytes per report", a.len()));
    all &= det.0;
    println!(
        "criterion 10: {} verify reports byte-identical across two runs {}",
        if det.0 { "PASS" } else { "FAIL" },
        det.1
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
