//! Run-report structures and JSON/CSV serialization shared by the CLI.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::ApplicabilityReport;
use crate::levelset::{LevelBisectState, MinimizeReport};
use crate::symcurve::CurveTrace;

pub const SCHEMA_VERSION: u32 = 1;

/// Configuration echo so a report is reproducible from itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub function: String,
    pub lo: f64,
    pub hi: f64,
    pub algo: Option<String>,
    pub delta: f64,
    pub tol_x: f64,
    pub eps: Option<f64>,
    pub one_sided: Option<usize>,
    pub levels: Vec<f64>,
    pub grid_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunResult {
    Minimize(MinimizeReport),
    Analyze(ApplicabilityReport),
    Crossings { level: f64, crossings: Vec<f64> },
    Curve(CurveTrace),
    Compare(CompareTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub wall_time_ms: f64,
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub x_hat: f64,
    pub evaluations: u64,
    pub iterations: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub verdict: String,
    pub rows: Vec<CompareRow>,
    /// Pairwise |x_hat_i - x_hat_j| keyed "method_i/method_j".
    pub x_hat_spread: Vec<(String, f64)>,
}

impl CompareTable {
    pub fn new(verdict: String, rows: Vec<CompareRow>) -> Self {
        let mut x_hat_spread = Vec::new();
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                x_hat_spread.push((
                    format!("{}/{}", rows[i].method, rows[j].method),
                    (rows[i].x_hat - rows[j].x_hat).abs(),
                ));
            }
        }
        Self { verdict, rows, x_hat_spread }
    }
}

fn csv_num(v: f64) -> String {
    // 17 significant digits: enough to round-trip an f64 exactly
    format!("{v:.16e}")
}

/// CSV trace of a minimization run: `iter,l,u,x_left,x_right,evals`.
pub fn minimize_trace_csv(trace: &[LevelBisectState]) -> String {
    let mut out = String::from("iter,l,u,x_left,x_right,evals\n");
    for s in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.iter,
            csv_num(s.l),
            csv_num(s.u),
            csv_num(s.x_left),
            csv_num(s.x_right),
            s.evals
        );
    }
    out
}

/// CSV of a symmetry-curve trace: `level,x_left,x_right,midpoint`.
pub fn curve_csv(trace: &CurveTrace) -> String {
    let mut out = String::from("level,x_left,x_right,midpoint\n");
    for s in &trace.samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_num(s.level),
            csv_num(s.x_left),
            csv_num(s.x_right),
            csv_num(s.midpoint)
        );
    }
    out
}

/// CSV of crossing locations: single column `x`.
pub fn crossings_csv(crossings: &[f64]) -> String {
    let mut out = String::from("x\n");
    for &x in crossings {
        let _ = writeln!(out, "{}", csv_num(x));
    }
    out
}

/// CSV of a comparison table: `method,x_hat,evaluations,iterations,wall_time_ms`.
pub fn compare_csv(table: &CompareTable) -> String {
    let mut out = String::from("method,x_hat,evaluations,iterations,wall_time_ms\n");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.method,
            csv_num(r.x_hat),
            r.evaluations,
            r.iterations,
            csv_num(r.wall_time_ms)
        );
    }
    out
}

/// Best-effort CSV projection of any result kind.
pub fn result_csv(result: &RunResult) -> String {
    match result {
        RunResult::Minimize(r) => minimize_trace_csv(&r.trace),
        RunResult::Curve(t) => curve_csv(t),
        RunResult::Crossings { crossings, .. } => crossings_csv(crossings),
        RunResult::Compare(t) => compare_csv(t),
        RunResult::Analyze(a) => {
            let mut out = String::from("level,crossings\n");
            for (y, n) in &a.crossing_counts {
                let _ = writeln!(out, "{},{}", csv_num(*y), n);
            }
            out
        }
    }
}

pub fn to_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::MinimizeStatus;

    fn sample_report() -> RunReport {
        RunReport {
            schema_version: SCHEMA_VERSION,
            config: RunConfig {
                function: "quadratic:1,-6,11".into(),
                lo: -10.0,
                hi: 10.0,
                algo: Some("bisect_level".into()),
                delta: 1e-6,
                tol_x: 1e-10,
                eps: None,
                one_sided: None,
                levels: vec![],
                grid_n: 100_000,
            },
            wall_time_ms: 1.25,
            result: RunResult::Minimize(MinimizeReport {
                x_hat: 3.0000000001,
                bracket: (2.9999999, 3.0000001),
                y_bounds: (2.0, 2.0000001),
                iterations: 27,
                evaluations: 812,
                trace: vec![LevelBisectState {
                    l: 2.0,
                    u: 11.0,
                    x_left: -10.0,
                    x_right: 10.0,
                    iter: 0,
                    evals: 2,
                }],
                status: MinimizeStatus::Converged,
            }),
        }
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let report = sample_report();
        let json = to_json(&report);
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(to_json(&back), json);
    }

    #[test]
    fn csv_headers_and_precision() {
        let report = sample_report();
        let RunResult::Minimize(r) = &report.result else { unreachable!() };
        let csv = minimize_trace_csv(&r.trace);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iter,l,u,x_left,x_right,evals");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "0");
        assert_eq!(row[1].parse::<f64>().unwrap(), 2.0);
        assert_eq!(row[5], "2");

        // 17 significant digits round-trip any f64 value exactly
        let v = std::f64::consts::PI * 1e-7;
        assert_eq!(csv_num(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn compare_table_spread() {
        let t = CompareTable::new(
            "strictly_convex_ok".into(),
            vec![
                CompareRow {
                    method: "bisect_level".into(),
                    x_hat: 3.0,
                    evaluations: 100,
                    iterations: 20,
                    wall_time_ms: 0.5,
                },
                CompareRow {
                    method: "golden".into(),
                    x_hat: 3.0 + 1e-9,
                    evaluations: 60,
                    iterations: 48,
                    wall_time_ms: 0.2,
                },
            ],
        );
        assert_eq!(t.x_hat_spread.len(), 1);
        assert_eq!(t.x_hat_spread[0].0, "bisect_level/golden");
        assert!((t.x_hat_spread[0].1 - 1e-9).abs() < 1e-15);
        let csv = compare_csv(&t);
        assert!(csv.starts_with("method,x_hat,evaluations,iterations,wall_time_ms\n"));
    }
}
