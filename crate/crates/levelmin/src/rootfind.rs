//! Solving `f(x) = y` on a bracket: bisection and Brent-style root
//! extraction, unimodal feasibility probing, two-sided crossing pairs, and a
//! grid scan that counts every intersection of the graph with a horizontal
//! line (transversal crossings and tangential touches alike).

use thiserror::Error;

pub const DEFAULT_TOL_X: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_PROBE_DEPTH: u32 = 60;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("no sign change of f - {level} on [{lo}, {hi}]")]
    Bracket { level: f64, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("iteration cap exceeded, best bracket [{lo}, {hi}]")]
    Convergence { lo: f64, hi: f64 },
    #[error("level {0} does not meet the graph on the bracket")]
    InfeasibleLevel(f64),
}

/// Root-localization strategy. Both are deterministic; Brent is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Bisection,
    #[default]
    Brent,
}

/// Outcome of a feasibility probe: `feasible` iff some probed point had
/// `f <= y`, in which case `witness` holds such a point.
#[derive(Debug, Clone, Copy)]
pub struct ProbeResult {
    pub feasible: bool,
    pub witness: Option<f64>,
    pub evaluations: u64,
}

/// The two abscissas where `f` meets the level `y`, with the feasibility
/// witness between them.
#[derive(Debug, Clone, Copy)]
pub struct CrossingPair {
    pub x_left: f64,
    pub x_right: f64,
    pub witness: f64,
    pub level: f64,
    pub residual_left: f64,
    pub residual_right: f64,
}

/// Locate a root of `f(x) - y` inside `[lo, hi]`, given opposite signs at the
/// endpoints (an exact zero at an endpoint is accepted). The sign change is
/// narrowed to a bracket of width `<= tol_x`.
pub fn bracketed_root(
    f: impl Fn(f64) -> f64,
    y: f64,
    lo: f64,
    hi: f64,
    tol_x: f64,
) -> Result<f64, RootError> {
    bracketed_root_with(f, y, lo, hi, tol_x, Strategy::default())
}

pub fn bracketed_root_with(
    f: impl Fn(f64) -> f64,
    y: f64,
    lo: f64,
    hi: f64,
    tol_x: f64,
    strategy: Strategy,
) -> Result<f64, RootError> {
    if !(tol_x > 0.0) {
        return Err(RootError::Param(format!("tol_x = {tol_x} must be > 0")));
    }
    if !(lo <= hi) {
        return Err(RootError::Param(format!("bad bracket [{lo}, {hi}]")));
    }
    let g = |x: f64| f(x) - y;
    let ga = g(lo);
    let gb = g(hi);
    if ga == 0.0 {
        return Ok(lo);
    }
    if gb == 0.0 {
        return Ok(hi);
    }
    if ga.signum() == gb.signum() {
        return Err(RootError::Bracket { level: y, lo, hi });
    }
    match strategy {
        Strategy::Bisection => bisect_root(&g, lo, ga, hi, tol_x),
        Strategy::Brent => brent_root(&g, lo, ga, hi, gb, tol_x),
    }
}

fn bisect_root(
    g: &impl Fn(f64) -> f64,
    mut a: f64,
    mut ga: f64,
    mut b: f64,
    tol_x: f64,
) -> Result<f64, RootError> {
    for _ in 0..DEFAULT_MAX_ITER {
        let mid = 0.5 * (a + b);
        if b - a <= tol_x || mid <= a || mid >= b {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Err(RootError::Convergence { lo: a, hi: b })
}

// Brent's method: inverse quadratic / secant steps with a bisection fallback.
fn brent_root(
    g: &impl Fn(f64) -> f64,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    tol_x: f64,
) -> Result<f64, RootError> {
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..DEFAULT_MAX_ITER {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol_x;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // attempt inverse quadratic interpolation (secant if a == c)
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = b - a;
        }
    }
    Err(RootError::Convergence { lo: b.min(c), hi: b.max(c) })
}

/// Decide whether the level `y` is reached by `f` on `[lo, hi]`, assuming `f`
/// unimodal there. Golden-section descent keeps the side with the smaller
/// value (ties keep the left side) until the interval has shrunk by
/// `2^max_depth`, so an infeasible verdict is resolution-limited. One new
/// evaluation per shrink step.
pub fn feasibility_probe(
    f: impl Fn(f64) -> f64,
    y: f64,
    lo: f64,
    hi: f64,
    max_depth: u32,
) -> Result<ProbeResult, RootError> {
    if !(lo < hi) {
        return Err(RootError::Param(format!("bad interval [{lo}, {hi}]")));
    }
    if max_depth < 1 {
        return Err(RootError::Param("max_depth must be >= 1".into()));
    }
    let mut evals = 0u64;
    let mut probe = |x: f64| {
        evals += 1;
        f(x)
    };
    let feasible = |w: f64, evals: u64| ProbeResult { feasible: true, witness: Some(w), evaluations: evals };
    if probe(lo) <= y {
        return Ok(feasible(lo, evals));
    }
    if probe(hi) <= y {
        return Ok(feasible(hi, evals));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let target = (hi - lo) * 2f64.powi(-(max_depth as i32));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    if x1 <= a || x2 >= b || x2 <= x1 {
        return Ok(ProbeResult { feasible: false, witness: None, evaluations: evals });
    }
    let mut f1 = probe(x1);
    if f1 <= y {
        return Ok(feasible(x1, evals));
    }
    let mut f2 = probe(x2);
    if f2 <= y {
        return Ok(feasible(x2, evals));
    }
    while b - a >= target {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            if x1 <= a || x1 >= x2 {
                break; // interval no longer splittable in floating point
            }
            f1 = probe(x1);
            if f1 <= y {
                return Ok(feasible(x1, evals));
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            if x2 >= b || x2 <= x1 {
                break;
            }
            f2 = probe(x2);
            if f2 <= y {
                return Ok(feasible(x2, evals));
            }
        }
    }
    Ok(ProbeResult { feasible: false, witness: None, evaluations: evals })
}

/// Extract the two crossings of the level `y` around the minimum of a
/// unimodal `f` on `[lo, hi]`. An endpoint already at or below the level is
/// taken as the crossing on that side. An infeasible probe is reported as
/// [`RootError::InfeasibleLevel`]; for the level-bisection loop that verdict
/// is a signal, not a failure.
pub fn crossing_pair(
    f: impl Fn(f64) -> f64,
    y: f64,
    lo: f64,
    hi: f64,
    tol_x: f64,
    max_depth: u32,
) -> Result<CrossingPair, RootError> {
    let probe = feasibility_probe(&f, y, lo, hi, max_depth)?;
    let w = match probe.witness {
        Some(w) => w,
        None => return Err(RootError::InfeasibleLevel(y)),
    };
    let x_left = if f(lo) <= y {
        lo
    } else {
        bracketed_root(&f, y, lo, w, tol_x)?
    };
    let x_right = if f(hi) <= y {
        hi
    } else {
        bracketed_root(&f, y, w, hi, tol_x)?
    };
    Ok(CrossingPair {
        x_left,
        x_right,
        witness: w,
        level: y,
        residual_left: (f(x_left) - y).abs(),
        residual_right: (f(x_right) - y).abs(),
    })
}

// Golden-section refinement of an extremum of g inside [a, b]; returns the
// best abscissa/value pair seen. Used to decide whether a one-sided grid
// extremum actually reaches the level (tangential touch) or hides a pair of
// transversal crossings.
fn refine_extremum(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, minimize: bool) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let sign = if minimize { 1.0 } else { -1.0 };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut g1 = sign * g(x1);
    let mut g2 = sign * g(x2);
    let (mut best_x, mut best_g) = if g1 <= g2 { (x1, g1) } else { (x2, g2) };
    for _ in 0..150 {
        if b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
        if g1 <= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - INV_PHI * (b - a);
            g1 = sign * g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + INV_PHI * (b - a);
            g2 = sign * g(x2);
        }
        let (cx, cg) = if g1 <= g2 { (x1, g1) } else { (x2, g2) };
        if cg < best_g {
            best_x = cx;
            best_g = cg;
        }
    }
    (best_x, sign * best_g)
}

/// Count and locate every intersection of `f` with the horizontal line at
/// level `y` on `[lo, hi]`, up to grid resolution. Three detectors feed the
/// result:
///
/// * adjacent sign changes of `f - y`, localized with [`bracketed_root`];
/// * grid points where `f - y` is exactly zero (a run counts once);
/// * one-sided grid extrema of `f - y` that do not change sign: these are
///   refined, and counted as a single tangential touch when the refined
///   extremum reaches the level to floating-point resolution, or as the two
///   transversal crossings they hide when it goes past it.
///
/// Crossings closer together than the grid spacing may merge.
pub fn scan_crossings(
    f: impl Fn(f64) -> f64,
    y: f64,
    lo: f64,
    hi: f64,
    grid_n: usize,
    tol_x: f64,
) -> Result<Vec<f64>, RootError> {
    if grid_n < 2 {
        return Err(RootError::Param("grid_n must be >= 2".into()));
    }
    if !(lo < hi) {
        return Err(RootError::Param(format!("bad interval [{lo}, {hi}]")));
    }
    let width = hi - lo;
    let grid_x = |i: usize| lo + width * (i as f64 / grid_n as f64);
    let d: Vec<f64> = (0..=grid_n).map(|i| f(grid_x(i)) - y).collect();
    let touch_tol = 8.0 * f64::EPSILON * (1.0 + y.abs());

    let mut crossings: Vec<f64> = Vec::new();
    // exact-zero runs, each counted once at the run midpoint
    let mut i = 0;
    while i <= grid_n {
        if d[i] == 0.0 {
            let start = i;
            while i < grid_n && d[i + 1] == 0.0 {
                i += 1;
            }
            crossings.push(0.5 * (grid_x(start) + grid_x(i)));
        }
        i += 1;
    }
    // sign changes between strictly adjacent nonzero values
    for i in 1..=grid_n {
        if d[i - 1] != 0.0 && d[i] != 0.0 && d[i - 1].signum() != d[i].signum() {
            crossings.push(bracketed_root(&f, y, grid_x(i - 1), grid_x(i), tol_x)?);
        }
    }
    // one-sided extrema: tangential touches or sub-grid crossing pairs
    for i in 1..grid_n {
        let is_pos_min = d[i] > 0.0 && d[i - 1] > d[i] && d[i] <= d[i + 1];
        let is_neg_max = d[i] < 0.0 && d[i - 1] < d[i] && d[i] >= d[i + 1];
        if !is_pos_min && !is_neg_max {
            continue;
        }
        let g = |x: f64| f(x) - y;
        let (xm, dm) = refine_extremum(&g, grid_x(i - 1), grid_x(i + 1), is_pos_min);
        if dm.abs() <= touch_tol {
            crossings.push(xm);
        } else if dm.signum() != d[i].signum() {
            // the extremum passes the level between grid points
            crossings.push(bracketed_root(&f, y, grid_x(i - 1), xm, tol_x)?);
            crossings.push(bracketed_root(&f, y, xm, grid_x(i + 1), tol_x)?);
        }
    }
    crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(crossings)
}
