//! Run a scenario file and print its report table.
//!
//!     cargo run --example run_scenario -- scenarios/ms-kastanas-h1.json

use std::path::PathBuf;

use gowers_lab::scenario::{render, run_scenario, Format, RunOptions};

fn main() {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/ms-kastanas-h1.json")));
    let report = run_scenario(&path, &RunOptions::default());
    print!("{}", render(&report, Format::Table));
    std::process::exit(report.exit_code);
}
