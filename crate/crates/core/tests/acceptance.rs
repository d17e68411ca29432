//! Runs every acceptance criterion at full size, one after another so that
//! the timings are not skewed by other tests sharing the machine, and prints
//! one PASS/FAIL line per criterion.

use std::process::ExitCode;

use qgph::conformance::{self, Level};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (id, _) in conformance::CRITERIA {
        let report = conformance::run(id, Level::Full);
        println!("{}", report.line());
        if !report.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", conformance::CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
