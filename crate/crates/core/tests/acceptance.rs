//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use amalgrowth::verification::{run, SuiteConfig};

fn main() -> ExitCode {
    let results = run(&SuiteConfig::default());
    for r in &results {
        println!(
            "criterion {:>2} {} ({:.1}s) {}: {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.seconds,
            r.name,
            r.measured
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
