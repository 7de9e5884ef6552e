//! Minimization by bisection on the level: shrink the x-bracket around the
//! minimizer by intersecting the function with horizontal lines whose levels
//! are driven toward the minimum value, either by bisecting a level bracket
//! or by a geometric schedule. A classical golden-section minimizer is
//! provided as an independent oracle.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ScalarFn;
use crate::rootfind::{
    self, bracketed_root, crossing_pair, feasibility_probe, RootError, DEFAULT_PROBE_DEPTH,
};

#[derive(Debug, Error)]
pub enum LevelSetError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeStatus {
    Converged,
    InfeasibleStart,
    IterationCap,
    NotApplicable,
}

/// One iteration snapshot: level bounds, x-bracket at the last feasible
/// level, and cumulative evaluation count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelBisectState {
    pub l: f64,
    pub u: f64,
    pub x_left: f64,
    pub x_right: f64,
    pub iter: usize,
    pub evals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub x_hat: f64,
    pub bracket: (f64, f64),
    pub y_bounds: (f64, f64),
    pub iterations: usize,
    pub evaluations: u64,
    pub trace: Vec<LevelBisectState>,
    pub status: MinimizeStatus,
}

#[derive(Debug, Clone)]
pub struct BisectOptions {
    /// Starting upper level; defaults to `max(f(lo), f(hi))`.
    pub y_init: Option<f64>,
    /// Starting lower level; defaults to a 65-point grid minimum minus one.
    pub y_lower: Option<f64>,
    /// Stop once the x-bracket is at most this wide.
    pub delta: f64,
    pub tol_x: f64,
    /// One-sided economy: with period `h`, only the right crossing is
    /// recomputed on feasible steps, with a full two-sided refresh every
    /// `h`-th one.
    pub one_sided_period: Option<usize>,
    pub max_iter: usize,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions {
            y_init: None,
            y_lower: None,
            delta: 1e-6,
            tol_x: rootfind::DEFAULT_TOL_X,
            one_sided_period: None,
            max_iter: rootfind::DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeometricOptions {
    pub y_init: f64,
    /// Level decay factor in (0, 1).
    pub eps: f64,
    pub delta: f64,
    pub tol_x: f64,
    pub max_iter: usize,
}

impl Default for GeometricOptions {
    fn default() -> Self {
        GeometricOptions {
            y_init: 1.0,
            eps: 0.5,
            delta: 1e-6,
            tol_x: rootfind::DEFAULT_TOL_X,
            max_iter: rootfind::DEFAULT_MAX_ITER,
        }
    }
}

struct LoopState {
    l: f64,
    u: f64,
    x_left: f64,
    x_right: f64,
    iter: usize,
    feasible_steps: usize,
}

impl LoopState {
    fn snapshot(&self, evals: u64) -> LevelBisectState {
        LevelBisectState {
            l: self.l,
            u: self.u,
            x_left: self.x_left,
            x_right: self.x_right,
            iter: self.iter,
            evals,
        }
    }
}

// The level-bisection loop shared by both schedules: halve the level gap,
// shrink the bracket on feasible levels, raise the lower bound on infeasible
// ones. The bracket (and hence the loop guard) only changes after feasible
// steps.
fn run_level_bisection(
    g: &impl Fn(f64) -> f64,
    evals: &Cell<u64>,
    state: &mut LoopState,
    delta: f64,
    tol_x: f64,
    one_sided_period: Option<usize>,
    max_iter: usize,
    trace: &mut Vec<LevelBisectState>,
) -> Result<MinimizeStatus, LevelSetError> {
    while state.x_right - state.x_left > delta {
        if state.iter >= max_iter {
            return Ok(MinimizeStatus::IterationCap);
        }
        state.iter += 1;
        let temp = 0.5 * (state.u + state.l);
        let probe = feasibility_probe(g, temp, state.x_left, state.x_right, DEFAULT_PROBE_DEPTH)?;
        match probe.witness {
            None => state.l = temp,
            Some(w) => {
                state.feasible_steps += 1;
                // the stale left edge must not delay the width guard, so the
                // endgame (bracket within a few delta) is always two-sided
                let endgame = state.x_right - state.x_left <= 16.0 * delta;
                let full_refresh = match one_sided_period {
                    Some(h) if h > 1 && !endgame => state.feasible_steps % h == 0,
                    _ => true,
                };
                if w < state.x_right && g(state.x_right) > temp {
                    state.x_right = bracketed_root(g, temp, w, state.x_right, tol_x)?;
                }
                if full_refresh && w > state.x_left && g(state.x_left) > temp {
                    state.x_left = bracketed_root(g, temp, state.x_left, w, tol_x)?;
                }
                state.u = temp;
            }
        }
        trace.push(state.snapshot(evals.get()));
    }
    Ok(MinimizeStatus::Converged)
}

fn grid_min(g: &impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    (0..=points)
        .map(|i| g(lo + (hi - lo) * (i as f64 / points as f64)))
        .fold(f64::INFINITY, f64::min)
}

fn report_from(state: &LoopState, trace: Vec<LevelBisectState>, evals: u64, status: MinimizeStatus) -> MinimizeReport {
    MinimizeReport {
        x_hat: 0.5 * (state.x_left + state.x_right),
        bracket: (state.x_left, state.x_right),
        y_bounds: (state.l, state.u),
        iterations: state.iter,
        evaluations: evals,
        trace,
        status,
    }
}

fn validate_common(lo: f64, hi: f64, delta: f64, tol_x: f64) -> Result<(), LevelSetError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(LevelSetError::Param(format!("bad domain [{lo}, {hi}]")));
    }
    if !(delta > 0.0) {
        return Err(LevelSetError::Param(format!("delta = {delta} must be > 0")));
    }
    if !(tol_x > 0.0) {
        return Err(LevelSetError::Param(format!("tol_x = {tol_x} must be > 0")));
    }
    Ok(())
}

/// Minimize a unimodal `f` on `[lo, hi]` by bisecting on the level value.
///
/// Each iteration tests the mid-level between the current bounds: a feasible
/// level becomes the new upper bound and shrinks the x-bracket to its
/// crossing pair; an infeasible one becomes the new lower bound. Terminates
/// once the bracket is no wider than `delta`.
pub fn minimize_level_bisect(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    opts: &BisectOptions,
) -> Result<MinimizeReport, LevelSetError> {
    validate_common(lo, hi, opts.delta, opts.tol_x)?;
    if opts.one_sided_period == Some(0) {
        return Err(LevelSetError::Param("one_sided_period must be >= 1".into()));
    }
    let evals = Cell::new(0u64);
    let g = |x: f64| {
        evals.set(evals.get() + 1);
        f.eval(x)
    };
    let y_init = opts.y_init.unwrap_or_else(|| g(lo).max(g(hi)));
    let y_lower = opts.y_lower.unwrap_or_else(|| grid_min(&g, lo, hi, 64) - 1.0);
    if !(y_lower < y_init) {
        return Err(LevelSetError::Param(format!(
            "y_lower = {y_lower} must be below y_init = {y_init}"
        )));
    }
    let mut state = LoopState {
        l: y_lower,
        u: y_init,
        x_left: lo,
        x_right: hi,
        iter: 0,
        feasible_steps: 0,
    };
    match crossing_pair(&g, y_init, lo, hi, opts.tol_x, DEFAULT_PROBE_DEPTH) {
        Ok(pair) => {
            state.x_left = pair.x_left;
            state.x_right = pair.x_right;
        }
        Err(RootError::InfeasibleLevel(_)) => {
            return Ok(report_from(&state, Vec::new(), evals.get(), MinimizeStatus::InfeasibleStart));
        }
        Err(e) => return Err(e.into()),
    }
    let mut trace = vec![state.snapshot(evals.get())];
    let status = run_level_bisection(
        &g,
        &evals,
        &mut state,
        opts.delta,
        opts.tol_x,
        opts.one_sided_period,
        opts.max_iter,
        &mut trace,
    )?;
    Ok(report_from(&state, trace, evals.get(), status))
}

/// Minimize with the geometric level schedule `y <- eps * y`, falling back
/// to level bisection between the last feasible and first infeasible level.
///
/// The schedule converges to zero, so it can only pass below minima that are
/// nonnegative; runs whose bracket stagnates while every level stays
/// feasible finish with [`MinimizeStatus::NotApplicable`].
pub fn minimize_geometric(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    opts: &GeometricOptions,
) -> Result<MinimizeReport, LevelSetError> {
    validate_common(lo, hi, opts.delta, opts.tol_x)?;
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(LevelSetError::Param(format!("eps = {} must be in (0, 1)", opts.eps)));
    }
    let evals = Cell::new(0u64);
    let g = |x: f64| {
        evals.set(evals.get() + 1);
        f.eval(x)
    };
    let y_lower0 = grid_min(&g, lo, hi, 64) - 1.0;
    let mut state = LoopState {
        l: y_lower0,
        u: opts.y_init,
        x_left: lo,
        x_right: hi,
        iter: 0,
        feasible_steps: 0,
    };
    match crossing_pair(&g, opts.y_init, lo, hi, opts.tol_x, DEFAULT_PROBE_DEPTH) {
        Ok(pair) => {
            state.x_left = pair.x_left;
            state.x_right = pair.x_right;
        }
        Err(RootError::InfeasibleLevel(_)) => {
            return Ok(report_from(&state, Vec::new(), evals.get(), MinimizeStatus::InfeasibleStart));
        }
        Err(e) => return Err(e.into()),
    }
    let mut trace = vec![state.snapshot(evals.get())];
    let mut widths: Vec<f64> = vec![state.x_right - state.x_left];
    let status = loop {
        if state.x_right - state.x_left <= opts.delta {
            break MinimizeStatus::Converged;
        }
        if state.iter >= opts.max_iter {
            break MinimizeStatus::IterationCap;
        }
        state.iter += 1;
        let y_next = opts.eps * state.u;
        match crossing_pair(&g, y_next, state.x_left, state.x_right, opts.tol_x, DEFAULT_PROBE_DEPTH) {
            Ok(pair) => {
                state.x_left = pair.x_left;
                state.x_right = pair.x_right;
                state.u = y_next;
                state.feasible_steps += 1;
                trace.push(state.snapshot(evals.get()));
                let width = state.x_right - state.x_left;
                widths.push(width);
                // stagnation: 50 feasible steps without meaningful shrink
                // means the schedule is bottoming out above the bracket
                // resolution (a minimum below zero, unreachable by eps^k * y)
                if widths.len() > 50 && width > 0.99 * widths[widths.len() - 51] {
                    break MinimizeStatus::NotApplicable;
                }
            }
            Err(RootError::InfeasibleLevel(_)) => {
                // bisect between the bracketing levels to finish
                state.l = y_next;
                break run_level_bisection(
                    &g,
                    &evals,
                    &mut state,
                    opts.delta,
                    opts.tol_x,
                    None,
                    opts.max_iter,
                    &mut trace,
                )?;
            }
            Err(e) => return Err(e.into()),
        }
    };
    Ok(report_from(&state, trace, evals.get(), status))
}

/// Classical golden-section minimization of a unimodal function; returns the
/// final bracket midpoint and its value. Independent of the level-set path,
/// used to cross-check it.
pub fn golden_section_min(
    f: &ScalarFn,
    lo: f64,
    hi: f64,
    tol_x: f64,
) -> Result<(f64, f64), LevelSetError> {
    validate_common(lo, hi, 1.0, tol_x)?;
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f.eval(x1);
    let mut f2 = f.eval(x2);
    while b - a > tol_x {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f.eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f.eval(x2);
        }
        if !(x1 > a && x2 < b && x1 < x2) {
            break; // floating-point floor reached
        }
    }
    let xm = 0.5 * (a + b);
    Ok((xm, f.eval(xm)))
}
