//! One line per acceptance criterion, aggregated from the verification suites
//! at their default orders. Every comparison inside the suites is exact.

use qbracket::suites::{run_suite, Check, Outcome, Settings, SUITES};
use std::process::ExitCode;

const CRITERIA: [&str; 10] = [
    "one-point function of W",
    "two-point function, recursion against brackets",
    "level-1 quasimodularity of two-factor brackets",
    "modular projections",
    "Klein form",
    "hook-length and moment kernels",
    "double moments",
    "derivation algebra",
    "Taylor coefficients at rational translates",
    "higher-level brackets",
];

/// Checks of identities exactly as written that are contradicted by the
/// computation; each has a passing corrected companion in the same suite.
const KNOWN_RED: [&str; 2] = ["⟨π(T_{k,l})⟩ as stated", "T_{1,1}⊙f = −2𝕖₂·f"];

fn main() -> ExitCode {
    let settings = Settings::default();
    let mut checks: Vec<Check> = Vec::new();
    for suite in SUITES {
        checks.extend(run_suite(suite, &settings).expect("suite names are known").checks);
    }
    let mut unexpected = Vec::new();
    for (i, title) in CRITERIA.iter().enumerate() {
        let n = i as u8 + 1;
        let mine: Vec<&Check> = checks.iter().filter(|c| c.criterion == Some(n)).collect();
        let failing: Vec<&Check> = mine.iter().copied().filter(|c| c.status == Outcome::Fail).collect();
        let inconclusive = mine.iter().filter(|c| c.status == Outcome::Inconclusive).count();
        let verdict = if mine.is_empty() || !failing.is_empty() { "FAIL" } else { "PASS" };
        let mut line = format!("criterion {n:>2} {verdict}  {title}: {}/{} checks pass", mine.len() - failing.len() - inconclusive, mine.len());
        if inconclusive > 0 {
            line.push_str(&format!(", {inconclusive} inconclusive"));
        }
        if !failing.is_empty() {
            let names: Vec<&str> = failing.iter().map(|c| c.name.as_str()).collect();
            line.push_str(&format!("; failing: {}", names.join(" | ")));
        }
        println!("{line}");
        if mine.is_empty() {
            unexpected.push(format!("criterion {n} has no checks"));
        }
        unexpected.extend(failing.iter().filter(|c| !KNOWN_RED.contains(&c.name.as_str())).map(|c| format!("{}: {}", c.name, c.detail)));
    }
    let red: Vec<&Check> = checks.iter().filter(|c| c.status == Outcome::Fail && KNOWN_RED.contains(&c.name.as_str())).collect();
    for c in &red {
        println!("known red: {} ({}); {}", c.name, c.anchor, c.detail);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("unexpected failure: {u}");
        }
        ExitCode::FAILURE
    }
}
