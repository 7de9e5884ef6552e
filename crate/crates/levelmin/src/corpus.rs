//! Test-function corpus: the two strictly convex reference functions, the
//! oscillatory and non-smooth counterexamples, and the anomalous construction
//! whose level sets cluster near the minimum.
//!
//! Every function is exposed as a [`ScalarFn`]: a pure `f64 -> f64` map with a
//! working domain and metadata (convexity class, known minimum when analytic).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown function name `{0}`")]
    UnknownName(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("x = {x} outside domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
}

/// Shape class of a corpus function, as relevant to the level-set method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityClass {
    StrictlyConvexCoercive,
    Convex,
    FiniteMonotonicityChanges,
    PathologicalOscillatory,
    Anomalous,
}

/// An evaluatable real function on a closed interval.
///
/// Evaluation is deterministic and side-effect free; handles are cheap to
/// clone and safe to share across threads.
#[derive(Clone)]
pub struct ScalarFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: (f64, f64),
    pub name: String,
    pub convexity_class: ConvexityClass,
    pub known_min: Option<(f64, f64)>,
}

impl ScalarFn {
    pub fn new(
        name: impl Into<String>,
        domain: (f64, f64),
        convexity_class: ConvexityClass,
        known_min: Option<(f64, f64)>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!(
            domain.0 < domain.1 && domain.0.is_finite() && domain.1.is_finite(),
            "domain must be a finite non-empty interval"
        );
        if let Some((xs, ys)) = known_min {
            assert!(xs >= domain.0 && xs <= domain.1, "known minimizer outside domain");
            assert!((f(xs) - ys).abs() <= 1e-12, "known_min inconsistent with eval");
        }
        ScalarFn {
            f: Arc::new(f),
            domain,
            name: name.into(),
            convexity_class,
            known_min,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("ScalarFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("convexity_class", &self.convexity_class)
            .field("known_min", &self.known_min)
            .finish()
    }
}

/// Parameters of the anomalous construction: minimum at `(x_star, m)`,
/// level clusters at `m + eps/n`, neighborhood radius `delta`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnomalousParams {
    pub x_star: f64,
    pub m: f64,
    pub eps: f64,
    pub delta: f64,
}

impl AnomalousParams {
    pub fn new(x_star: f64, m: f64, eps: f64, delta: f64) -> Result<Self, CorpusError> {
        let all_finite =
            x_star.is_finite() && m.is_finite() && eps.is_finite() && delta.is_finite();
        if !all_finite || m <= 0.0 || eps <= 0.0 || delta <= 0.0 {
            return Err(CorpusError::Params(
                "anomalous requires finite x_star and m, eps, delta > 0".into(),
            ));
        }
        Ok(AnomalousParams { x_star, m, eps, delta })
    }
}

/// Index `n >= 1` of the interval `[x*-delta/n, x*-delta/(n+1)]` containing
/// the point at offset `t = x* - x`, i.e. the unique `n` with
/// `delta/(n+1) < t <= delta/n`. Exact boundaries `t = delta/k` go to
/// interval `k`.
pub fn anomalous_interval_index(t: f64, delta: f64) -> Result<u64, CorpusError> {
    if !(t > 0.0 && t <= delta) {
        return Err(CorpusError::Domain { x: t, lo: 0.0, hi: delta });
    }
    let mut n = (delta / t).floor().max(1.0) as u64;
    // settle floating boundary cases against the computed endpoints
    while n > 1 && t > delta / n as f64 {
        n -= 1;
    }
    while t <= delta / (n + 1) as f64 {
        n += 1;
    }
    Ok(n)
}

// Oscillatory piece on interval n (n odd), parameterized by the offset u from
// the left endpoint x* - delta/n. At u = 0 the sine argument blows up and the
// value is the prescribed endpoint value m + eps/n.
fn oscillatory_piece(p: &AnomalousParams, n: u64, u: f64) -> f64 {
    let base = p.m + p.eps / n as f64;
    if u <= 0.0 {
        return base;
    }
    u * u * ((1.0 / u).sin() + 1.0) + base
}

/// Value of the interval-`n` piece formula at offset `t = x* - x` with
/// `t` in `[delta/(n+1), delta/n]`: the shifted oscillation for odd `n`,
/// the connecting line for even `n`. Exposed so the junction-continuity
/// checks can evaluate adjacent formulas at a shared endpoint.
pub fn anomalous_piece(p: &AnomalousParams, n: u64, t: f64) -> f64 {
    let t_left = p.delta / n as f64;
    if n % 2 == 1 {
        oscillatory_piece(p, n, t_left - t)
    } else {
        // line from (x*-delta/n, h_{n-1}(x*-delta/n)) to (x*-delta/(n+1), m+eps/(n+1))
        let t_right = p.delta / (n + 1) as f64;
        let v_left = oscillatory_piece(p, n - 1, p.delta / (n - 1) as f64 - t_left);
        let v_right = p.m + p.eps / (n + 1) as f64;
        v_left + (v_right - v_left) * (t_left - t) / (t_left - t_right)
    }
}

/// The anomalous counterexample: equals `m` at `x = x*`, strictly greater
/// everywhere else, and attains each value `m + eps/n` (n odd) infinitely
/// many times as `x -> x*`. Mirror symmetric about `x = x*`.
pub fn eval_anomalous(x: f64, p: &AnomalousParams) -> Result<f64, CorpusError> {
    let t = (x - p.x_star).abs();
    if t > p.delta {
        return Err(CorpusError::Domain {
            x,
            lo: p.x_star - p.delta,
            hi: p.x_star + p.delta,
        });
    }
    if t == 0.0 {
        return Ok(p.m);
    }
    let n = anomalous_interval_index(t, p.delta)?;
    Ok(anomalous_piece(p, n, t))
}

fn smooth_bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// Build a corpus function by name. Accepted names and parameter arities:
/// `f1`, `f2`, `quadratic(a,b,c)` with `a > 0`, `osc_square_sin`,
/// `bump_sin2`, `sqrt_abs`, `anomalous(x_star,m,eps,delta)`.
pub fn make_corpus_function(name: &str, params: &[f64]) -> Result<ScalarFn, CorpusError> {
    let no_params = |label: &str| -> Result<(), CorpusError> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(CorpusError::Params(format!("{label} takes no parameters")))
        }
    };
    match name {
        "f1" => {
            no_params("f1")?;
            Ok(ScalarFn::new(
                "f1",
                (-10.0, 10.0),
                ConvexityClass::StrictlyConvexCoercive,
                Some((0.0, 1.0)),
                |x| if x < 0.0 { (-x).exp() } else { x * x / 16.0 + 1.0 },
            ))
        }
        "f2" => {
            no_params("f2")?;
            // left branch repaired to (1/8)|x|^(3/2); the literal x^(3/2) is
            // not real-valued for x < 0
            Ok(ScalarFn::new(
                "f2",
                (-10.0, 10.0),
                ConvexityClass::StrictlyConvexCoercive,
                Some((0.0, 0.0)),
                |x| if x < 0.0 { (-x).powf(1.5) / 8.0 } else { 0.25 * x * x * x },
            ))
        }
        "quadratic" => {
            if params.len() != 3 {
                return Err(CorpusError::Params("quadratic takes (a, b, c)".into()));
            }
            let (a, b, c) = (params[0], params[1], params[2]);
            if !(a > 0.0) || !b.is_finite() || !c.is_finite() {
                return Err(CorpusError::Params("quadratic requires finite b, c and a > 0".into()));
            }
            let xv = -b / (2.0 * a);
            let yv = c - b * b / (4.0 * a);
            Ok(ScalarFn::new(
                format!("quadratic({a},{b},{c})"),
                (-10.0, 10.0),
                ConvexityClass::StrictlyConvexCoercive,
                if (-10.0..=10.0).contains(&xv) { Some((xv, yv)) } else { None },
                move |x| (a * x + b) * x + c,
            ))
        }
        "osc_square_sin" => {
            no_params("osc_square_sin")?;
            Ok(ScalarFn::new(
                "osc_square_sin",
                (-1.0, 1.0),
                ConvexityClass::PathologicalOscillatory,
                None, // minimum value 0 is attained at x = 0 and at every sin(1/x) = -1
                |x| if x == 0.0 { 0.0 } else { x * x * ((1.0 / x).sin() + 1.0) },
            ))
        }
        "bump_sin2" => {
            no_params("bump_sin2")?;
            Ok(ScalarFn::new(
                "bump_sin2",
                (0.0, 1.0),
                ConvexityClass::PathologicalOscillatory,
                None,
                |x| {
                    let phi = smooth_bump(x);
                    if phi == 0.0 {
                        0.0
                    } else {
                        let s = (1.0 / x).sin();
                        phi * s * s
                    }
                },
            ))
        }
        "sqrt_abs" => {
            no_params("sqrt_abs")?;
            Ok(ScalarFn::new(
                "sqrt_abs",
                (-10.0, 10.0),
                ConvexityClass::FiniteMonotonicityChanges,
                Some((0.0, 0.0)),
                |x| x.abs().sqrt(),
            ))
        }
        "anomalous" => {
            if params.len() != 4 {
                return Err(CorpusError::Params("anomalous takes (x_star, m, eps, delta)".into()));
            }
            let p = AnomalousParams::new(params[0], params[1], params[2], params[3])?;
            Ok(ScalarFn::new(
                format!("anomalous({},{},{},{})", p.x_star, p.m, p.eps, p.delta),
                (p.x_star - p.delta, p.x_star + p.delta),
                ConvexityClass::Anomalous,
                Some((p.x_star, p.m)),
                move |x| {
                    // clamp the offset so evaluation is total; algorithms stay
                    // inside the domain
                    let t = (x - p.x_star).abs().min(p.delta);
                    if t == 0.0 {
                        p.m
                    } else {
                        let n = anomalous_interval_index(t, p.delta).expect("t in (0, delta]");
                        anomalous_piece(&p, n, t)
                    }
                },
            ))
        }
        other => Err(CorpusError::UnknownName(other.into())),
    }
}

/// Parse an inline function spec of the form `name` or `name:a,b,c`.
pub fn parse_function_spec(spec: &str) -> Result<ScalarFn, CorpusError> {
    match spec.split_once(':') {
        None => make_corpus_function(spec, &[]),
        Some((name, rest)) => {
            let params: Result<Vec<f64>, _> =
                rest.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let params = params
                .map_err(|e| CorpusError::Params(format!("bad parameter list `{rest}`: {e}")))?;
            make_corpus_function(name, &params)
        }
    }
}

/// Names of every corpus function with its default parameters, as accepted by
/// [`parse_function_spec`]. The anomalous entry uses the reference parameters
/// (0, 1, 0.1, 0.5).
pub fn default_corpus_specs() -> Vec<&'static str> {
    vec![
        "f1",
        "f2",
        "quadratic:1,-6,11",
        "osc_square_sin",
        "bump_sin2",
        "sqrt_abs",
        "anomalous:0,1,0.1,0.5",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_anomalous() -> AnomalousParams {
        AnomalousParams::new(0.0, 1.0, 0.1, 0.5).unwrap()
    }

    #[test]
    fn f1_values() {
        let f = make_corpus_function("f1", &[]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert!((f.eval(-1.0) - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(f.known_min, Some((0.0, 1.0)));
    }

    #[test]
    fn quadratic_vertex() {
        let f = make_corpus_function("quadratic", &[1.0, -6.0, 11.0]).unwrap();
        assert_eq!(f.eval(3.0), 2.0);
        assert_eq!(f.known_min, Some((3.0, 2.0)));
    }

    #[test]
    fn sqrt_abs_and_osc_values() {
        let f = make_corpus_function("sqrt_abs", &[]).unwrap();
        assert_eq!(f.eval(0.25), 0.5);
        let g = make_corpus_function("osc_square_sin", &[]).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
    }

    #[test]
    fn f2_continuous_at_zero_with_known_min() {
        let f = make_corpus_function("f2", &[]).unwrap();
        assert_eq!(f.known_min, Some((0.0, 0.0)));
        assert!(f.eval(-1e-9).abs() < 1e-12);
        assert!(f.eval(1e-9).abs() < 1e-12);
    }

    #[test]
    fn name_and_arity_errors() {
        assert!(matches!(
            make_corpus_function("nope", &[]),
            Err(CorpusError::UnknownName(_))
        ));
        assert!(matches!(
            make_corpus_function("quadratic", &[1.0]),
            Err(CorpusError::Params(_))
        ));
        assert!(matches!(
            make_corpus_function("f1", &[1.0]),
            Err(CorpusError::Params(_))
        ));
        assert!(matches!(
            make_corpus_function("anomalous", &[0.0, -1.0, 0.1, 0.5]),
            Err(CorpusError::Params(_))
        ));
    }

    #[test]
    fn interval_index_examples() {
        assert_eq!(anomalous_interval_index(0.4, 0.5).unwrap(), 1);
        assert_eq!(anomalous_interval_index(0.2, 0.5).unwrap(), 2);
        assert_eq!(anomalous_interval_index(0.5 / 3.0, 0.5).unwrap(), 3);
        assert!(matches!(
            anomalous_interval_index(0.0, 0.5),
            Err(CorpusError::Domain { .. })
        ));
        assert!(matches!(
            anomalous_interval_index(0.6, 0.5),
            Err(CorpusError::Domain { .. })
        ));
    }

    #[test]
    fn anomalous_reference_values() {
        let p = reference_anomalous();
        assert_eq!(eval_anomalous(0.0, &p).unwrap(), 1.0);
        assert!((eval_anomalous(-0.5, &p).unwrap() - 1.1).abs() < 1e-15);
        assert!((eval_anomalous(-0.5 / 3.0, &p).unwrap() - (1.0 + 0.1 / 3.0)).abs() < 1e-15);
        // mirror of the outermost endpoint
        assert_eq!(
            eval_anomalous(0.5, &p).unwrap(),
            eval_anomalous(-0.5, &p).unwrap()
        );
        // interior point of interval 1: direct h_1 evaluation
        let expect = 0.04 * (5.0f64.sin() + 1.0) + 1.1;
        assert!((eval_anomalous(-0.3, &p).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(
            eval_anomalous(0.6, &p),
            Err(CorpusError::Domain { .. })
        ));
    }

    #[test]
    fn anomalous_junction_continuity() {
        let p = reference_anomalous();
        for n in 2..=50u64 {
            let t = p.delta / n as f64;
            let from_outer = anomalous_piece(&p, n - 1, t);
            let from_inner = anomalous_piece(&p, n, t);
            assert!(
                (from_outer - from_inner).abs() <= 1e-12,
                "junction n={n}: {from_outer} vs {from_inner}"
            );
        }
    }

    #[test]
    fn anomalous_positivity_gap_on_grid() {
        let p = reference_anomalous();
        let f = make_corpus_function("anomalous", &[0.0, 1.0, 0.1, 0.5]).unwrap();
        let n = 100_000;
        for i in 0..=n {
            let x = -0.5 + i as f64 / n as f64;
            if x != 0.0 {
                assert!(f.eval(x) > p.m, "f({x}) = {} <= m", f.eval(x));
            }
        }
    }

    proptest! {
        #[test]
        fn anomalous_mirror_symmetry(t in 1e-12f64..=0.5) {
            let p = reference_anomalous();
            // x* = 0, so +-t are exact mirror abscissas
            prop_assert_eq!(
                eval_anomalous(-t, &p).unwrap().to_bits(),
                eval_anomalous(t, &p).unwrap().to_bits()
            );
        }

        #[test]
        fn interval_index_brackets_offset(t in 1e-9f64..=0.5) {
            let delta = 0.5f64;
            let n = anomalous_interval_index(t, delta).unwrap();
            prop_assert!(t <= delta / n as f64);
            prop_assert!(t > delta / (n + 1) as f64);
        }
    }
}
