//! Discrete tracing of the symmetry curve: the locus of midpoints of the two
//! level-y crossings, sampled on a descending level schedule, together with
//! the closure check that the curve's tail meets the minimizer found by the
//! level-bisection run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ScalarFn;
use crate::levelset::{MinimizeReport, MinimizeStatus};
use crate::rootfind::{crossing_pair, RootError, DEFAULT_PROBE_DEPTH};

#[derive(Debug, Error)]
pub enum SymCurveError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// One point of the symmetry curve: the midpoint of the two crossings that
/// generate it at the given level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCurveSample {
    pub midpoint: f64,
    pub level: f64,
    pub x_left: f64,
    pub x_right: f64,
}

/// Trace result: samples in input order; if some level was infeasible the
/// trace is truncated there and the offending level is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub samples: Vec<SymmetryCurveSample>,
    pub truncated_at: Option<f64>,
}

/// Sample the symmetry curve of a unimodal `f` on `[lo, hi]` at a strictly
/// decreasing list of levels.
pub fn trace_symmetry_curve(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    levels: &[f64],
    tol_x: f64,
) -> Result<CurveTrace, SymCurveError> {
    if levels.is_empty() {
        return Err(SymCurveError::Param("levels must be nonempty".into()));
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(SymCurveError::Param("levels must be strictly decreasing".into()));
    }
    let mut samples = Vec::with_capacity(levels.len());
    let mut bracket = (lo, hi);
    for &y in levels {
        match crossing_pair(|x| f.eval(x), y, bracket.0, bracket.1, tol_x, DEFAULT_PROBE_DEPTH) {
            Ok(pair) => {
                samples.push(SymmetryCurveSample {
                    midpoint: 0.5 * (pair.x_left + pair.x_right),
                    level: y,
                    x_left: pair.x_left,
                    x_right: pair.x_right,
                });
                bracket = (pair.x_left, pair.x_right);
            }
            Err(RootError::InfeasibleLevel(_)) => {
                return Ok(CurveTrace { samples, truncated_at: Some(y) });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(CurveTrace { samples, truncated_at: None })
}

/// The curve's closure point at the minimum: `(x_hat, mid(y_bounds))` from a
/// converged run, `verified` iff the last sample sits within `tol` of it in
/// both coordinates.
pub fn curve_closure_point(
    samples: &[SymmetryCurveSample],
    report: &MinimizeReport,
    tol: f64,
) -> Result<(f64, f64, bool), SymCurveError> {
    let last = samples
        .last()
        .ok_or_else(|| SymCurveError::Param("samples must be nonempty".into()))?;
    if report.status != MinimizeStatus::Converged {
        return Err(SymCurveError::Param("report must have converged".into()));
    }
    let x = report.x_hat;
    let y = 0.5 * (report.y_bounds.0 + report.y_bounds.1);
    let verified = (last.midpoint - x).abs() <= tol && (last.level - y).abs() <= tol;
    Ok((x, y, verified))
}

/// Geometric level schedule from `y_top` down to `y_bottom` (inclusive),
/// spaced log-uniformly in the gap above `floor`. Used as the default
/// schedule for curve tracing.
pub fn geometric_levels(y_top: f64, y_bottom: f64, floor: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && y_top > y_bottom && y_bottom > floor);
    let top_gap = y_top - floor;
    let bottom_gap = y_bottom - floor;
    let ratio = (bottom_gap / top_gap).powf(1.0 / (count - 1) as f64);
    let mut levels: Vec<f64> = (0..count)
        .map(|k| floor + top_gap * ratio.powi(k as i32))
        .collect();
    levels[count - 1] = y_bottom;
    levels.dedup_by(|b, a| *b >= *a);
    levels
}
