//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Built without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use matchcast_core::selftest::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
