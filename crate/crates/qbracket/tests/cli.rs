use qbracket::eisenstein::g_series;
use qbracket::{CycQ, QSeries};
use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn qbracket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbracket")).args(args).output().unwrap()
}

fn qbracket_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qbracket"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn series(out: &Output) -> QSeries {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    QSeries::from_json(&json(out)).unwrap()
}

fn ints(cs: &[i64]) -> Vec<CycQ> {
    cs.iter().map(|&c| CycQ::from_int(c)).collect()
}

#[test]
fn bracket_of_q2() {
    let s = series(&qbracket(&["Q(2)", "--order", "4"]));
    let mut expected = vec![CycQ::from_rat(qbracket::rat(-1, 24))];
    expected.extend(ints(&[1, 3, 4, 7]));
    for (n, c) in expected.iter().enumerate() {
        assert_eq!(&s.coeff_int(n as i64).unwrap(), c, "q^{n}");
    }
    assert_eq!(s.trunc().unwrap(), &qbracket::rat_int(5));
}

#[test]
fn bracket_of_one() {
    let s = series(&qbracket(&["1", "--order", "3"]));
    assert_eq!(s.truncate_int(4), QSeries::one().truncate_int(4));
}

#[test]
fn odot_square_of_t11() {
    let s = series(&qbracket(&["Todot[T(1,1),T(1,1)]", "--order", "5"]));
    let g2 = g_series(2, 6);
    assert!(s.eq_common(&g2.mul(&g2)));
}

#[test]
fn csv_output() {
    let out = qbracket(&["Q(2)", "--order", "2", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "exp,coeff\n0,\"-1/24\"\n1,\"1\"\n2,\"3\"\ntrunc,3\n");
}

#[test]
fn parse_errors_exit_with_2() {
    for spec in ["Q(2", "X(3)", "Q(2)**"] {
        let out = qbracket(&[spec]);
        assert_eq!(out.status.code(), Some(2), "{spec}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("grammar"));
    }
}

#[test]
fn certify_family() {
    let out = qbracket(&["certify", "--family", "Q(2)", "--depth", "1"]);
    let c = json(&out);
    assert_eq!(c["status"], "certified-to-order");
    assert_eq!(c["basis"], serde_json::json!(["G2"]));
    assert_eq!(c["solution"][0], CycQ::one().to_json());
}

#[test]
fn certify_from_stdin() {
    let one = r#"{"denom":1,"trunc":null,"terms":[{"exp":"0","coeff":{"modulus":1,"vec":[["0","1"]]}}]}"#;
    let c = json(&qbracket_with_stdin(&["certify", "--weight", "0", "--level", "1", "--depth", "0"], one));
    assert_eq!(c["status"], "certified-to-order");

    let q = r#"{"denom":1,"trunc":null,"terms":[{"exp":"1","coeff":{"modulus":1,"vec":[["0","1"]]}}]}"#;
    let c = json(&qbracket_with_stdin(&["certify", "-", "--weight", "2", "--depth", "0"], q));
    assert_eq!(c["status"], "failed");
}

#[test]
fn certify_rejects_bad_json() {
    assert_eq!(qbracket_with_stdin(&["certify", "--weight", "2"], "{").status.code(), Some(2));
    assert_eq!(qbracket_with_stdin(&["certify", "--weight", "2"], r#"{"denom":0}"#).status.code(), Some(2));
}

#[test]
fn short_series_is_a_compute_error() {
    let out = qbracket(&["certify", "--family", "Q(2)", "--order", "3", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quasimodular"));
}

#[test]
fn unknown_suite_exits_with_2() {
    assert_eq!(qbracket(&["verify", "modular-magic"]).status.code(), Some(2));
}

#[test]
fn verify_projections_passes_and_is_reproducible() {
    let a = qbracket(&["verify", "projections", "--no-timing"]);
    let b = qbracket(&["verify", "projections", "--no-timing"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report["suite"], "projections");
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn verify_j_algebra_records_the_seed() {
    let out = qbracket(&["verify", "j-algebra", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["seed"], 11);
    assert!(report["checks"][0]["runtime_ms"].is_u64());
}

#[test]
fn failing_check_exits_with_1() {
    assert_eq!(qbracket(&["verify", "double-moments", "--format", "csv"]).status.code(), Some(1));
}
