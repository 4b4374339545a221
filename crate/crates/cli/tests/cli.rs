use pqcalc_cli::{argv_from_record, run_command};
use serde_json::Value;
use std::process::Command;

fn run(args: &[&str]) -> pqcalc_cli::Outcome {
    run_command(args)
}

#[test]
fn help_and_parse_errors() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("identity-check"));
    let out = run(&["bogus"]);
    assert_eq!(out.code, 1);
    assert!(!out.stderr.is_empty());
    let out = run(&["gamma", "--kind", "first", "--z", "4"]);
    assert_eq!(out.code, 1, "missing --p/--q");
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["gamma", "--kind", "first", "--z", "2", "--p", "0.8", "--q", "0.5"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("p >= 1"));
    let out = run(&["eval", "tan", "--z", "1", "--p", "1.2", "--q", "0.8"]);
    assert_eq!(out.code, 1);
    let out = run(&["solve", "--problem", "first-order", "--params", "k=1", "--p", "1.2", "--q", "0.8"]);
    assert_eq!(out.code, 1);
    let out = run(&["eval", "e", "--z", "1", "--p", "1.2", "--q", "0.8", "--json", "--csv"]);
    assert_eq!(out.code, 1);
}

#[test]
fn non_convergence_exits_two_with_diagnostics() {
    let out = run(&["eval", "e", "--z", "2", "--p", "1.2", "--q", "0.8", "--max-terms", "3"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("terms_used = 3"));
    // the termwise second-kind series of e(at) diverges for every s
    let out = run(&[
        "transform", "--fn", "e(0.3t)", "--s", "1", "--kind", "second", "--mode", "table", "--p", "1.2", "--q", "0.8",
    ]);
    assert_eq!(out.code, 2);
    let out = run(&[
        "transform", "--fn", "E(0.3t)", "--s", "1", "--kind", "second", "--jmax", "5", "--p", "1.2", "--q", "0.8",
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn sweep_csv_is_ordered() {
    let out = run(&[
        "sweep", "--fn", "t^2", "--s-from", "1", "--s-to", "3", "--steps", "9", "--p", "1.2", "--q", "0.8", "--csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("s,value,terms_used,tail_estimate"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    // L{t²} = [2]!/(p³ s³)
    for (i, row) in rows.iter().enumerate() {
        let s = 1.0 + 0.25 * i as f64;
        assert_eq!(row[0], s);
        let closed = 2.0 / (1.2f64.powi(3) * s.powi(3));
        assert!((row[1] - closed).abs() < 1e-12 * closed);
    }
}

#[test]
fn table_needs_no_parameters() {
    let out = run(&["table", "--kind", "second"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("t^n E(at)"));
    let out = run(&["table", "--kind", "first", "--json"]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["value"].as_array().unwrap().len() >= 10);
}

#[test]
fn solve_reports_residuals() {
    let out = run(&[
        "solve", "--problem", "oscillator", "--params", "omega=1,A=1,B=2", "--p", "1.2", "--q", "0.72", "--json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["value"]["residual"]["passed"], Value::Bool(true));
    assert_eq!(v["value"]["residual"]["points"].as_array().unwrap().len(), 4);
    assert!(v["value"]["solution"].as_str().unwrap().contains("cos("));
}

#[test]
fn every_suite_passes() {
    for suite in pqcalc_cli::suites::SUITES {
        let out = run(&["identity-check", "--suite", suite, "--p", "1.5", "--q", "0.9"]);
        assert_eq!(out.code, 0, "{suite}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn json_records_rebuild_their_invocation() {
    let out = run(&["integrate", "--fn", "e(-0.5t)", "--improper", "--p", "1.2", "--q", "0.8", "--tol", "1e-15", "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rec: Value = serde_json::from_str(&out.stdout).unwrap();
    let argv = argv_from_record(&rec).unwrap();
    assert_eq!(run_command(&argv).stdout, out.stdout);
}

#[test]
fn binary_matches_library() {
    let args = ["gamma", "--kind", "second", "--z", "2.5", "--p", "1.2", "--q", "0.8", "--json"];
    let out = Command::new(env!("CARGO_BIN_EXE_pqcalc")).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), run(&args).stdout);
}
