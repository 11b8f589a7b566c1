//! The full acceptance battery. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;

use tate_forge_cli::suite::{run_acceptance, SuiteOptions};

fn main() -> ExitCode {
    let report = run_acceptance(&SuiteOptions::default(), &mut |c| println!("{}", c.line()));
    let total = report.criteria.len();
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    println!("acceptance: {passed}/{total} criteria passed");
    for f in &report.failures {
        println!("failed: {f}");
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
