//! End-to-end acceptance run: one line per criterion, then a nonzero exit if
//! any criterion failed. Runs without the libtest harness so the lines are
//! never captured.

use std::time::Instant;

use fracpoisson::stats::SuiteEntry;
use fracpoisson::validation::Suite;

const SEED: u64 = 1;
const PARALLEL_JOBS: usize = 3;

fn describe(entries: &[SuiteEntry]) -> String {
    entries
        .iter()
        .filter(|e| !e.pass)
        .map(|e| format!("{} (statistic {:.4e}, p {:?})", e.name, e.statistic, e.p))
        .collect::<Vec<_>>()
        .join("; ")
}

fn main() {
    let mut failures = Vec::new();
    let mut serial_reports = Vec::new();
    for (index, suite) in Suite::ALL.into_iter().filter(|s| *s != Suite::Determinism).enumerate() {
        let start = Instant::now();
        let entries = suite.run(SEED, 1).unwrap_or_else(|e| panic!("{suite} did not run: {e}"));
        let pass = entries.iter().all(|e| e.pass);
        println!(
            "criterion {:>2} {:<20} {} ({} checks, {:.1} s){}",
            index + 1,
            suite.name(),
            if pass { "PASS" } else { "FAIL" },
            entries.len(),
            start.elapsed().as_secs_f64(),
            if pass { String::new() } else { format!(": {}", describe(&entries)) }
        );
        if !pass {
            failures.push(suite.name());
        }
        if suite.is_stochastic() {
            serial_reports.push((suite, serde_json::to_string(&entries).unwrap()));
        }
    }

    let start = Instant::now();
    let mismatched: Vec<_> = serial_reports
        .iter()
        .filter(|(suite, serial)| {
            let parallel = suite.run(SEED, PARALLEL_JOBS).unwrap();
            *serial != serde_json::to_string(&parallel).unwrap()
        })
        .map(|(suite, _)| suite.name())
        .collect();
    println!(
        "criterion 12 {:<20} {} ({} suites rerun with {PARALLEL_JOBS} jobs, {:.1} s){}",
        Suite::Determinism.name(),
        if mismatched.is_empty() { "PASS" } else { "FAIL" },
        serial_reports.len(),
        start.elapsed().as_secs_f64(),
        if mismatched.is_empty() { String::new() } else { format!(": {}", mismatched.join(", ")) }
    );
    if !mismatched.is_empty() {
        failures.push(Suite::Determinism.name());
    }

    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
