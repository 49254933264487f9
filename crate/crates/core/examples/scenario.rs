//! Runs a scenario file the same way `gqms run` does.
//!
//! cargo run --example scenario -- crates/core/examples/two_boson.json [out-dir]

use std::path::PathBuf;

use gaussian_qms::scenario::{load_config, run_scenario};

fn main() -> gaussian_qms::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/two_boson.json")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("gqms-scenario"));
    let report = run_scenario(&load_config(&config)?, Some(&out), false)?;
    for t in &report.tasks {
        let mark = if t.passed { "ok" } else { "FAILED" };
        println!("{:<14} outcome={:<5} expect={:<5} {mark}", t.task, t.outcome, t.expect);
    }
    println!("report: {}", out.join("report.json").display());
    std::process::exit(report.exit_code());
}
