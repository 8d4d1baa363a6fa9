use std::process::Command;

use jqt_core::cli::{run, Output, EXIT_CHECK_FAILED, EXIT_USAGE};
use jqt_core::{CfExpansion, FieldSpec, LaurentSeries};
use serde_json::Value;

fn jqt(args: &[&str]) -> Output {
    let mut v = vec!["jqt"];
    v.extend_from_slice(args);
    run(v)
}

fn json(args: &[&str]) -> Value {
    let mut v = args.to_vec();
    v.extend_from_slice(&["--format", "json"]);
    let out = jqt(&v);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn rational_expansion() {
    let out = jqt(&["--q", "2", "cf", "--rational", "(T^2+1)/T"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.trim(), "[T; T]");
}

// Agrees with the brute-force lattice sums in j_oracle.rs.
#[test]
fn golden_j_value() {
    let out = jqt(&["--q", "2", "jinv", "--cfrac", "[0; | T]", "--eps", "3,1", "--prec", "20"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("abs_log = 7"), "{}", out.stdout);
    let v = json(&["--q", "2", "jinv", "--cfrac", "[0; | T]", "--eps", "3,1"]);
    assert_eq!(v["result"]["abs_log"], 7);
    let f = FieldSpec::prime(2).unwrap();
    let j = LaurentSeries::from_json(&v["result"]["value"], &f).unwrap();
    assert_eq!(j.top(), Some(7));
}

#[test]
fn rational_input_has_infinite_j() {
    let out = jqt(&["--q", "2", "jinv", "--rational", "1/(T^2+T+1)", "--eps", "4,1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("infinity (certified)"), "{}", out.stdout);
}

#[test]
fn rational_at_its_own_denominator() {
    let out = jqt(&["--q", "2", "jinv", "--rational", "(T^2+1)/T", "--eps", "1,1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("j = infinity (certified)"), "{}", out.stdout);
}

fn verdicts(seed: &str) -> Vec<String> {
    let out = jqt(&["--q", "2", "check", "--seed", seed]);
    assert!(out.code == 0 || out.code == EXIT_CHECK_FAILED);
    out.stdout.lines().filter(|l| !l.starts_with(' ')).map(|l| l[..7].to_string()).collect()
}

#[test]
fn check_verdicts_do_not_depend_on_seed() {
    let a = jqt(&["--q", "2", "check", "--seed", "7"]);
    let b = jqt(&["--q", "2", "check", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(verdicts("7"), verdicts("2024"));
}

#[test]
fn check_with_tiny_precision_is_exhausted() {
    let out = jqt(&["--q", "2", "check", "--prec", "2"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("precision exhausted"), "{}", out.stderr);
}

#[test]
fn cf_json_round_trip() {
    let f = FieldSpec::with_order(4).unwrap();
    let v = json(&["--q", "4", "cf", "--cfrac", "[T; T^2 | [0,1]*T, T+1]"]);
    let cf = CfExpansion::from_json(&v["result"]["cf"], &f).unwrap();
    assert_eq!(cf.preperiod().len(), 1);
    assert_eq!(cf.period().len(), 2);
    assert_eq!(cf.to_json(&f), v["result"]["cf"]);
}

#[test]
fn zeta_json_round_trip() {
    let f = FieldSpec::prime(3).unwrap();
    let v = json(&["--q", "3", "zeta", "--cfrac", "[0; | T]", "--eps", "1,1", "--n", "2"]);
    let z = LaurentSeries::from_json(&v["result"]["value"], &f).unwrap();
    assert_eq!(z.to_json(&f), v["result"]["value"]);
    assert!(z.top().is_some());
}

#[test]
fn exit_codes() {
    assert_eq!(jqt(&["--q", "2", "cf", "--cfrac", "[0; | T"]).code, 2);
    assert_eq!(jqt(&["--q", "2", "jinv", "--cfrac", "[0; | T]", "--eps", "1,1", "--prec", "2"]).code, 3);
    assert_eq!(jqt(&["--q", "2", "cf", "--rational", "1/0"]).code, 4);
    assert_eq!(jqt(&["--q", "6", "cf", "--rational", "1/T"]).code, 4);
    assert_eq!(jqt(&["--q", "2", "jinv", "--cfrac", "[0; | T]", "--eps", "0,1"]).code, 4);
    assert_eq!(jqt(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(jqt(&["--help"]).code, 0);
}

#[test]
fn errors_in_json_mode() {
    let out = jqt(&["--q", "2", "cf", "--cfrac", "[0; | T", "--format", "json"]);
    assert_eq!(out.code, 2);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["error"]["exit_code"], 2);
    assert!(out.stderr.starts_with("error: "));
}

#[test]
fn weyl_golden_is_zero() {
    let v = json(&["--q", "2", "weyl", "--cfrac", "[0; | T]", "--dmax", "6"]);
    let s = v.to_string();
    assert!(s.contains("\"constant\":true"), "{s}");
}

#[test]
fn output_is_deterministic() {
    let args = ["--q", "3", "limits", "--cfrac", "[0; | T, 2*T^2+1]", "--nmax", "6"];
    assert_eq!(jqt(&args).stdout, jqt(&args).stdout);
}

#[test]
fn binary_check_reports_failures() {
    let out = Command::new(env!("CARGO_BIN_EXE_jqt"))
        .args(["--q", "2", "check"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 10);
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == EXIT_CHECK_FAILED);
    assert_eq!(code == 0, !text.contains("FAIL"));
}
