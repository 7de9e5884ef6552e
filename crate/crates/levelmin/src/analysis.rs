//! Executable hypothesis checks gating the level-set method: convexity via
//! the difference quotient, monotonicity-change counting, sublevel
//! boundedness, local coercivity, and the aggregate applicability verdict.
//! All verdicts are grid-resolution statements, not proofs; reports carry
//! their grid size so callers can escalate resolution.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ScalarFn;
use crate::rootfind::{bracketed_root, scan_crossings, RootError};

/// Default cap on the number of monotonicity changes still considered
/// "finite" for the applicability verdict.
pub const DEFAULT_CHANGE_CAP: usize = 32;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyConvexOk,
    CorollaryOk,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicabilityReport {
    pub convex_on_grid: bool,
    pub monotonicity_changes: usize,
    pub locally_coercive: bool,
    pub crossing_counts: Vec<(f64, usize)>,
    pub verdict: Verdict,
    pub grid_n: usize,
}

fn grid_points(f: &ScalarFn, lo: f64, hi: f64, grid_n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..=grid_n)
        .map(|i| lo + (hi - lo) * (i as f64 / grid_n as f64))
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    (xs, fs)
}

/// Convexity on a uniform grid: for every anchor point, the difference
/// quotient toward later grid points must be non-decreasing, with relative
/// tolerance 1e-12. The comparison is cross-multiplied so the inner loop is
/// division-free; on a uniform grid the spacing cancels out.
pub fn difference_quotient_convexity(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Result<bool, AnalysisError> {
    if grid_n < 3 {
        return Err(AnalysisError::Param("grid_n must be >= 3".into()));
    }
    let (_, fs) = grid_points(f, lo, hi, grid_n);
    // Sufficient-condition screen: nonnegative second differences make
    // R(x_i, .) exactly non-decreasing for every anchor, so the tolerant
    // all-anchor check passes. O(n) instead of the O(n^2) sweep below.
    if fs.windows(3).all(|w| w[2] - w[1] >= w[1] - w[0]) {
        return Ok(true);
    }
    // R(x_i, x_j) >= R(x_i, x_{j-1}) - tol  <=>
    // (f_j - f_i) * (j-1-i) >= (f_{j-1} - f_i) * (j-i) - tol-term,
    // with spacings reduced to index counts. The comparisons for one anchor
    // are mutually independent, so the inner loop runs branchless over
    // chunks (vectorizable) with an early exit between chunks.
    let idx: Vec<f64> = (0..=grid_n).map(|k| k as f64).collect();
    for i in 0..grid_n - 1 {
        let fi = fs[i];
        let tail = &fs[i + 1..]; // tail[k] = fs[i+1+k], so j - i = k + 1
        let mut k = 1;
        while k < tail.len() {
            let end = (k + 4096).min(tail.len());
            let mut bad = 0u32;
            for k in k..end {
                let lhs = (tail[k] - fi) * idx[k];
                let rhs = (tail[k - 1] - fi) * idx[k + 1];
                let tol = 1e-12 * rhs.abs().max(idx[k] * idx[k + 1]);
                bad += (lhs < rhs - tol) as u32;
            }
            if bad > 0 {
                return Ok(false);
            }
            k = end;
        }
    }
    Ok(true)
}

/// Number of strict sign alternations in the sequence of consecutive grid
/// differences, plateaus skipped. A grid-resolution lower bound on the true
/// number of monotonicity changes.
pub fn count_monotonicity_changes(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Result<usize, AnalysisError> {
    if grid_n < 3 {
        return Err(AnalysisError::Param("grid_n must be >= 3".into()));
    }
    let (_, fs) = grid_points(f, lo, hi, grid_n);
    let mut changes = 0;
    let mut last_sign = 0.0f64;
    for w in fs.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let s = d.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    Ok(changes)
}

/// Grid proxy for boundedness of the sublevel set {f <= lambda} within the
/// working domain: the set is empty, or strictly interior with f above
/// lambda at both endpoints.
pub fn sublevel_bounded(
    f: &ScalarFn,
    lambda: f64,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Result<bool, AnalysisError> {
    if grid_n < 3 {
        return Err(AnalysisError::Param("grid_n must be >= 3".into()));
    }
    let (_, fs) = grid_points(f, lo, hi, grid_n);
    if fs.iter().all(|&v| v > lambda) {
        return Ok(true);
    }
    Ok(fs[0] > lambda && fs[grid_n] > lambda)
}

/// Search for a neighborhood (a, b) of `x_star` with equal boundary values L
/// (equalized by root-finding to ~1e-9) and the function below L on a
/// sampled interior majority, strictly below at `x_star` itself.
pub fn local_coercivity_check(
    f: &ScalarFn,
    x_star: f64,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Result<bool, AnalysisError> {
    if !(x_star > lo && x_star < hi) {
        return Err(AnalysisError::Param(format!(
            "x_star = {x_star} must be interior to [{lo}, {hi}]"
        )));
    }
    let fx = f.eval(x_star);
    let scan_n = grid_n.clamp(64, 4096);
    // try anchors a from near x_star outward; the first workable one decides
    for k in 1..=32 {
        let a = x_star - (x_star - lo) * k as f64 / 33.0;
        let level = f.eval(a);
        if !(level > fx) {
            continue;
        }
        // find b > x_star with f(b) = level: first up-crossing on the right
        let mut b = None;
        let mut prev_x = x_star;
        let mut prev_v = fx - level;
        for i in 1..=scan_n {
            let x = x_star + (hi - x_star) * (i as f64 / scan_n as f64);
            let v = f.eval(x) - level;
            if v == 0.0 {
                b = Some(x);
                break;
            }
            if prev_v < 0.0 && v > 0.0 {
                b = Some(bracketed_root(|x| f.eval(x), level, prev_x, x, 1e-12)?);
                break;
            }
            prev_x = x;
            prev_v = v;
        }
        let Some(b) = b else { continue };
        if (f.eval(b) - level).abs() > 1e-9 {
            continue;
        }
        // interior majority strictly below the boundary value
        let samples = 128;
        let below = (1..samples)
            .filter(|&i| f.eval(a + (b - a) * (i as f64 / samples as f64)) < level)
            .count();
        if below * 2 > samples - 1 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Aggregate applicability classification with the default monotonicity cap.
pub fn applicability_report(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    grid_n: usize,
    probe_levels: usize,
) -> Result<ApplicabilityReport, AnalysisError> {
    applicability_report_with(f, lo, hi, grid_n, probe_levels, DEFAULT_CHANGE_CAP)
}

/// Aggregate applicability classification.
///
/// `strictly_convex_ok` requires grid convexity and at most one monotonicity
/// change. `corollary_ok` requires a change count within `change_cap`, local
/// coercivity at the grid argmin, and a crossing pair bracketing the argmin
/// at every probed level just above the grid minimum. Everything else is
/// `not_applicable`.
pub fn applicability_report_with(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    grid_n: usize,
    probe_levels: usize,
    change_cap: usize,
) -> Result<ApplicabilityReport, AnalysisError> {
    if grid_n < 100 {
        return Err(AnalysisError::Param("grid_n must be >= 100".into()));
    }
    let (xs, fs) = grid_points(f, lo, hi, grid_n);
    let argmin = fs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let (x_min, f_min) = (xs[argmin], fs[argmin]);
    let f_max = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let convex_on_grid = difference_quotient_convexity(f, lo, hi, grid_n)?;
    let monotonicity_changes = count_monotonicity_changes(f, lo, hi, grid_n)?;
    let locally_coercive = if x_min > lo && x_min < hi {
        local_coercivity_check(f, x_min, lo, hi, grid_n)?
    } else {
        false
    };

    let mut crossing_counts = Vec::with_capacity(probe_levels);
    let mut bracketing_pair_everywhere = true;
    if f_max > f_min {
        for k in 1..=probe_levels {
            let y = f_min + (f_max - f_min) * 0.01 * k as f64;
            let crossings = scan_crossings(|x| f.eval(x), y, lo, hi, grid_n, 1e-10)?;
            let has_pair = crossings.iter().any(|&c| c < x_min)
                && crossings.iter().any(|&c| c > x_min);
            bracketing_pair_everywhere &= has_pair;
            crossing_counts.push((y, crossings.len()));
        }
    } else {
        bracketing_pair_everywhere = false;
    }

    let verdict = if convex_on_grid && monotonicity_changes <= 1 {
        Verdict::StrictlyConvexOk
    } else if monotonicity_changes <= change_cap
        && locally_coercive
        && bracketing_pair_everywhere
    {
        Verdict::CorollaryOk
    } else {
        Verdict::NotApplicable
    };
    Ok(ApplicabilityReport {
        convex_on_grid,
        monotonicity_changes,
        locally_coercive,
        crossing_counts,
        verdict,
        grid_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_corpus_function, parse_function_spec, ConvexityClass, ScalarFn};
    use crate::levelset::{minimize_level_bisect, BisectOptions, MinimizeStatus};

    #[test]
    fn convexity_verdicts() {
        let q = make_corpus_function("quadratic", &[1.0, -6.0, 11.0]).unwrap();
        assert!(difference_quotient_convexity(&q, -10.0, 10.0, 200).unwrap());

        let osc = make_corpus_function("osc_square_sin", &[]).unwrap();
        assert!(!difference_quotient_convexity(&osc, -0.2, 0.2, 2000).unwrap());

        let s = make_corpus_function("sqrt_abs", &[]).unwrap();
        assert!(!difference_quotient_convexity(&s, -1.0, 1.0, 200).unwrap());
    }

    #[test]
    fn convexity_invariant_under_affine_level_change() {
        for spec in ["quadratic:1,-6,11", "f1", "sqrt_abs", "osc_square_sin"] {
            let f = parse_function_spec(spec).unwrap();
            let g = {
                let f = f.clone();
                ScalarFn::new(
                    "affine",
                    f.domain,
                    ConvexityClass::Convex,
                    None,
                    move |x| 2.0 * f.eval(x) + 3.0,
                )
            };
            let (lo, hi) = f.domain;
            assert_eq!(
                difference_quotient_convexity(&f, lo, hi, 500).unwrap(),
                difference_quotient_convexity(&g, lo, hi, 500).unwrap(),
                "{spec}"
            );
        }
    }

    #[test]
    fn monotonicity_change_counts() {
        let q = make_corpus_function("quadratic", &[1.0, -6.0, 11.0]).unwrap();
        assert_eq!(count_monotonicity_changes(&q, -10.0, 10.0, 1000).unwrap(), 1);

        let f1 = make_corpus_function("f1", &[]).unwrap();
        assert_eq!(count_monotonicity_changes(&f1, -10.0, 10.0, 1000).unwrap(), 1);

        let osc = make_corpus_function("osc_square_sin", &[]).unwrap();
        assert!(count_monotonicity_changes(&osc, 0.01, 0.2, 100_000).unwrap() >= 4);
    }

    #[test]
    fn sublevel_boundedness() {
        let f1 = make_corpus_function("f1", &[]).unwrap();
        assert!(sublevel_bounded(&f1, 5.0, -10.0, 10.0, 1000).unwrap());

        let q = make_corpus_function("quadratic", &[1.0, -6.0, 11.0]).unwrap();
        assert!(!sublevel_bounded(&q, 200.0, -10.0, 10.0, 1000).unwrap());
        // below the minimum: empty sublevel is bounded
        assert!(sublevel_bounded(&q, 1.0, -10.0, 10.0, 1000).unwrap());
    }

    #[test]
    fn local_coercivity_examples() {
        let q = make_corpus_function("quadratic", &[1.0, -6.0, 11.0]).unwrap();
        assert!(local_coercivity_check(&q, 3.0, -10.0, 10.0, 1000).unwrap());

        let f1 = make_corpus_function("f1", &[]).unwrap();
        assert!(local_coercivity_check(&f1, 0.0, -10.0, 10.0, 1000).unwrap());

        // strictly increasing restriction: no interior minimum at x_star
        assert!(!local_coercivity_check(&q, 5.0, 4.0, 10.0, 1000).unwrap());

        assert!(matches!(
            local_coercivity_check(&q, -11.0, -10.0, 10.0, 1000),
            Err(AnalysisError::Param(_))
        ));
    }

    #[test]
    fn applicability_verdicts() {
        let f1 = make_corpus_function("f1", &[]).unwrap();
        let r = applicability_report(&f1, -10.0, 10.0, 2000, 5).unwrap();
        assert_eq!(r.verdict, Verdict::StrictlyConvexOk);

        let s = make_corpus_function("sqrt_abs", &[]).unwrap();
        let r = applicability_report(&s, -10.0, 10.0, 2000, 5).unwrap();
        assert_eq!(r.verdict, Verdict::CorollaryOk);
        assert!(!r.convex_on_grid);
        assert_eq!(r.monotonicity_changes, 1);
        assert!(r.locally_coercive);

        let a = make_corpus_function("anomalous", &[0.0, 1.0, 0.1, 0.5]).unwrap();
        let r = applicability_report(&a, -0.5, 0.5, 100_000, 5).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn convexity_implies_single_monotonicity_change() {
        for spec in crate::corpus::default_corpus_specs() {
            let f = parse_function_spec(spec).unwrap();
            let (lo, hi) = f.domain;
            if difference_quotient_convexity(&f, lo, hi, 1000).unwrap() {
                assert!(
                    count_monotonicity_changes(&f, lo, hi, 1000).unwrap() <= 1,
                    "{spec}"
                );
            }
        }
    }

    #[test]
    fn strictly_convex_verdict_implies_convergence() {
        for spec in crate::corpus::default_corpus_specs() {
            let f = parse_function_spec(spec).unwrap();
            let (lo, hi) = f.domain;
            let r = applicability_report(&f, lo, hi, 2000, 5).unwrap();
            if r.verdict == Verdict::StrictlyConvexOk {
                let run = minimize_level_bisect(&f, lo, hi, &BisectOptions::default()).unwrap();
                assert_eq!(run.status, MinimizeStatus::Converged, "{spec}");
            }
        }
    }
}
