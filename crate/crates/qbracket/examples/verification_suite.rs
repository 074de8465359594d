//! Run one verification suite and print its report as CSV.

use qbracket::suites::{run_suite, Settings};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "hooks".to_string());
    let report = run_suite(&name, &Settings::default()).unwrap();
    print!("{}", report.to_csv(false));
    println!("passed: {}", report.passed());
}
