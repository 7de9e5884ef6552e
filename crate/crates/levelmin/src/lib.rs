//! Level-set bisection minimization for one-dimensional functions.
//!
//! The core idea: instead of searching the x-axis directly, bisect on the
//! *value* axis. Maintain bounds `l <= min f <= u`, probe the midpoint level
//! for feasibility (does `{f <= y}` meet the bracket?), and shrink the
//! x-bracket to the crossing pair of each feasible level. Each iteration
//! halves the value gap regardless of how flat the function is near its
//! minimum, which is where ordinary x-axis methods slow down.
//!
//! Modules:
//! - [`corpus`]: benchmark functions, including an anomalous construction
//!   with infinitely many level-set crossings clustering at the minimizer;
//! - [`rootfind`]: bracketed root-finding, feasibility probes, crossing
//!   extraction and level-set scans;
//! - [`levelset`]: the minimization drivers (plain level bisection, a
//!   geometric level schedule, and a golden-section baseline);
//! - [`symcurve`]: tracing the symmetry curve of crossing midpoints;
//! - [`analysis`]: executable applicability checks (convexity, coercivity,
//!   monotonicity structure);
//! - [`report`]: JSON/CSV run reports.

pub mod analysis;
pub mod corpus;
pub mod levelset;
pub mod report;
pub mod rootfind;
pub mod symcurve;
