//! Integration tests driving the compiled binary: exit-code contract, JSON
//! round-trip fidelity, CSV schemas, and atomic `--out` writes.

use std::process::{Command, Output};

use levelmin::report::{to_json, RunReport, RunResult};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levelmin"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_report(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).expect("stdout should be a JSON report")
}

#[test]
fn minimize_quadratic_json() {
    let out = run(&["minimize", "--fn", "quadratic:1,-6,11", "--algo", "bisect-level"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    assert_eq!(report.config.function, "quadratic:1,-6,11");
    let RunResult::Minimize(r) = &report.result else {
        panic!("expected a minimize payload")
    };
    assert!((r.x_hat - 3.0).abs() <= 1e-6);
    assert!(r.y_bounds.0 <= 2.0 && 2.0 <= r.y_bounds.1);
}

#[test]
fn json_round_trip_is_byte_identical() {
    let out = run(&["minimize", "--fn", "f1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&report), text.trim_end());
}

#[test]
fn geometric_negative_minimum_exits_2() {
    let out = run(&["minimize", "--fn", "quadratic:1,0,-5", "--algo", "geometric"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_exit_codes() {
    let out = run(&["analyze", "--fn", "f1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    let RunResult::Analyze(a) = &report.result else {
        panic!("expected an analyze payload")
    };
    assert!(a.convex_on_grid);

    let out = run(&["analyze", "--fn", "osc_square_sin"]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_report(&out);
    let RunResult::Analyze(a) = &report.result else {
        panic!("expected an analyze payload")
    };
    assert_eq!(serde_json::to_value(a.verdict).unwrap(), "not_applicable");
}

#[test]
fn crossings_anomalous_csv() {
    let out = run(&[
        "crossings",
        "--fn",
        "anomalous:0,1,0.1,0.5",
        "--level",
        "1.0333333333333334",
        "--grid-n",
        "1000000",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x"));
    let xs: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert!(xs.len() >= 6, "got {} crossings", xs.len());
    assert!(xs.windows(2).all(|w| w[0] < w[1]), "output must be sorted");
}

#[test]
fn curve_default_schedule() {
    let out = run(&["curve", "--fn", "quadratic:1,-6,11", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,x_left,x_right,midpoint"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 10);
    let last = rows.last().unwrap();
    assert!((last[3] - 3.0).abs() <= 1e-3, "final midpoint {}", last[3]);
}

#[test]
fn compare_contract() {
    let out = run(&["compare", "--fn", "f1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_report(&out);
    let RunResult::Compare(t) = &report.result else {
        panic!("expected a compare payload")
    };
    assert_eq!(t.rows.len(), 3);
    assert!(t.x_hat_spread.iter().all(|(_, d)| *d <= 2e-6));

    let out = run(&["compare", "--fn", "anomalous:0,1,0.1,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn out_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["minimize", "--fn", "sqrt_abs", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&report), text);
    // no leftover temp files next to the target
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["minimize", "--fn", "no_such_fn"]).status.code(), Some(1));
    assert_eq!(run(&["minimize", "--fn", "f1", "--delta", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["minimize", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["minimize", "--fn", "quadratic:1,2"]).status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1e-6"));
}
