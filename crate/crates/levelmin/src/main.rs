use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use levelmin::analysis::{applicability_report, Verdict};
use levelmin::corpus::{parse_function_spec, ScalarFn};
use levelmin::levelset::{
    golden_section_min, minimize_level_bisect, minimize_geometric, BisectOptions,
    GeometricOptions, MinimizeStatus,
};
use levelmin::report::{
    result_csv, to_json, CompareRow, CompareTable, RunConfig, RunReport, RunResult,
    SCHEMA_VERSION,
};
use levelmin::rootfind::scan_crossings;
use levelmin::symcurve::{geometric_levels, trace_symmetry_curve};

const DEFAULTS_TABLE: &str = "Defaults:
  --delta   1e-6    bracket-width stopping tolerance
  --tol-x   1e-10   root-finding tolerance
  --eps     0.5     geometric level decay factor
  --grid-n  100000  scan/analysis grid resolution
  --format  json

LEVELSET_MIN_SEED is reserved for future use; all runs are deterministic.";

#[derive(Parser)]
#[command(name = "levelmin", version, about = "Level-set bisection minimization toolkit", after_help = DEFAULTS_TABLE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    BisectLevel,
    Geometric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Corpus function, optionally with inline parameters: `name:a,b,c`
    #[arg(long = "fn")]
    function: String,
    /// Lower domain bound (default: the function's own domain)
    #[arg(long)]
    lo: Option<f64>,
    /// Upper domain bound (default: the function's own domain)
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    #[arg(long = "tol-x", default_value_t = 1e-10)]
    tol_x: f64,
    #[arg(long = "grid-n", default_value_t = 100_000)]
    grid_n: usize,
    /// Write the report here (atomically) instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize a corpus function by level-set bisection
    Minimize {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "bisect-level")]
        algo: Algo,
        /// Geometric level decay factor in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// One-sided refresh period (two-sided refresh every h-th feasible step)
        #[arg(long = "one-sided")]
        one_sided: Option<usize>,
    },
    /// Check applicability hypotheses and report a verdict
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Scan a level for all graph crossings
    Crossings {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "level", required = true)]
        level: f64,
    },
    /// Trace the symmetry curve of crossing midpoints
    Curve {
        #[command(flatten)]
        common: CommonArgs,
        /// Explicit levels, strictly decreasing (repeatable); default is a
        /// geometric schedule down to the converged level bounds
        #[arg(long = "level")]
        levels: Vec<f64>,
    },
    /// Cross-validate level bisection, geometric schedule, and golden section
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn resolve(common: &CommonArgs) -> Result<(ScalarFn, f64, f64), String> {
    let f = parse_function_spec(&common.function).map_err(|e| e.to_string())?;
    let lo = common.lo.unwrap_or(f.domain.0);
    let hi = common.hi.unwrap_or(f.domain.1);
    if !(lo < hi) {
        return Err(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    if !(common.delta > 0.0) {
        return Err("delta must be positive".into());
    }
    if !(common.tol_x > 0.0) {
        return Err("tol-x must be positive".into());
    }
    if common.grid_n < 100 {
        return Err("grid-n must be at least 100".into());
    }
    Ok((f, lo, hi))
}

fn config_echo(
    common: &CommonArgs,
    lo: f64,
    hi: f64,
    algo: Option<&str>,
    eps: Option<f64>,
    one_sided: Option<usize>,
    levels: Vec<f64>,
) -> RunConfig {
    RunConfig {
        function: common.function.clone(),
        lo,
        hi,
        algo: algo.map(str::to_owned),
        delta: common.delta,
        tol_x: common.tol_x,
        eps,
        one_sided,
        levels,
        grid_n: common.grid_n,
    }
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = dir
        .unwrap_or(Path::new("."))
        .join(format!(".levelmin-{}.tmp", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

fn emit(common: &CommonArgs, report: &RunReport) -> Result<(), String> {
    let payload = match common.format {
        Format::Json => to_json(report),
        Format::Csv => result_csv(&report.result),
    };
    match &common.out {
        Some(path) => write_atomic(path, &payload).map_err(|e| e.to_string()),
        None => {
            print!("{}", payload);
            if !payload.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn status_exit(status: MinimizeStatus) -> ExitCode {
    match status {
        MinimizeStatus::Converged => ExitCode::SUCCESS,
        _ => ExitCode::from(2),
    }
}

fn run() -> Result<ExitCode, String> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            let _ = e.print();
            return Ok(if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            });
        }
    };
    let start = Instant::now();
    match cli.command {
        Command::Minimize { common, algo, eps, one_sided } => {
            let (f, lo, hi) = resolve(&common)?;
            let report = match algo {
                Algo::BisectLevel => {
                    let opts = BisectOptions {
                        delta: common.delta,
                        tol_x: common.tol_x,
                        one_sided_period: one_sided,
                        ..Default::default()
                    };
                    minimize_level_bisect(&f, lo, hi, &opts).map_err(|e| e.to_string())?
                }
                Algo::Geometric => {
                    if !(eps > 0.0 && eps < 1.0) {
                        return Err("eps must lie in (0, 1)".into());
                    }
                    let opts = GeometricOptions {
                        y_init: f.eval(lo).max(f.eval(hi)),
                        eps,
                        delta: common.delta,
                        tol_x: common.tol_x,
                        ..Default::default()
                    };
                    minimize_geometric(&f, lo, hi, &opts).map_err(|e| e.to_string())?
                }
            };
            let status = report.status;
            let algo_name = match algo {
                Algo::BisectLevel => "bisect_level",
                Algo::Geometric => "geometric",
            };
            let run = RunReport {
                schema_version: SCHEMA_VERSION,
                config: config_echo(
                    &common,
                    lo,
                    hi,
                    Some(algo_name),
                    (algo == Algo::Geometric).then_some(eps),
                    one_sided,
                    vec![],
                ),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                result: RunResult::Minimize(report),
            };
            emit(&common, &run)?;
            Ok(status_exit(status))
        }
        Command::Analyze { common } => {
            let (f, lo, hi) = resolve(&common)?;
            let report =
                applicability_report(&f, lo, hi, common.grid_n, 5).map_err(|e| e.to_string())?;
            let verdict = report.verdict;
            let run = RunReport {
                schema_version: SCHEMA_VERSION,
                config: config_echo(&common, lo, hi, None, None, None, vec![]),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                result: RunResult::Analyze(report),
            };
            emit(&common, &run)?;
            Ok(if verdict == Verdict::NotApplicable {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Crossings { common, level } => {
            let (f, lo, hi) = resolve(&common)?;
            let crossings =
                scan_crossings(|x| f.eval(x), level, lo, hi, common.grid_n, common.tol_x)
                    .map_err(|e| e.to_string())?;
            let run = RunReport {
                schema_version: SCHEMA_VERSION,
                config: config_echo(&common, lo, hi, None, None, None, vec![level]),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                result: RunResult::Crossings { level, crossings },
            };
            emit(&common, &run)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve { common, levels } => {
            let (f, lo, hi) = resolve(&common)?;
            let levels = if levels.is_empty() {
                let opts = BisectOptions {
                    delta: common.delta,
                    tol_x: common.tol_x,
                    ..Default::default()
                };
                let r = minimize_level_bisect(&f, lo, hi, &opts).map_err(|e| e.to_string())?;
                if r.status != MinimizeStatus::Converged {
                    return Err("default curve schedule needs a converged run; pass explicit --level values".into());
                }
                let y_top = f.eval(lo).max(f.eval(hi));
                geometric_levels(y_top, r.y_bounds.1, r.y_bounds.0, 64)
            } else {
                levels
            };
            let trace = trace_symmetry_curve(&f, lo, hi, &levels, common.tol_x)
                .map_err(|e| e.to_string())?;
            let run = RunReport {
                schema_version: SCHEMA_VERSION,
                config: config_echo(&common, lo, hi, None, None, None, levels),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                result: RunResult::Curve(trace),
            };
            emit(&common, &run)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { common, eps } => {
            let (f, lo, hi) = resolve(&common)?;
            if !(eps > 0.0 && eps < 1.0) {
                return Err("eps must lie in (0, 1)".into());
            }
            // classification gate at a modest grid: we need the verdict, not
            // the full-resolution crossing counts
            let gate = applicability_report(&f, lo, hi, 2000, 5).map_err(|e| e.to_string())?;
            if gate.verdict == Verdict::NotApplicable {
                eprintln!(
                    "error: {} is not_applicable (convex_on_grid = {}, monotonicity changes = {}); nothing to compare",
                    common.function, gate.convex_on_grid, gate.monotonicity_changes
                );
                return Ok(ExitCode::from(2));
            }
            let verdict = match gate.verdict {
                Verdict::StrictlyConvexOk => "strictly_convex_ok",
                Verdict::CorollaryOk => "corollary_ok",
                Verdict::NotApplicable => unreachable!(),
            };
            let mut rows = Vec::new();
            let t0 = Instant::now();
            let opts = BisectOptions {
                delta: common.delta,
                tol_x: common.tol_x,
                ..Default::default()
            };
            let r = minimize_level_bisect(&f, lo, hi, &opts).map_err(|e| e.to_string())?;
            rows.push(CompareRow {
                method: "bisect_level".into(),
                x_hat: r.x_hat,
                evaluations: r.evaluations,
                iterations: r.iterations as u64,
                wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
            });
            let t0 = Instant::now();
            let gopts = GeometricOptions {
                y_init: f.eval(lo).max(f.eval(hi)),
                eps,
                delta: common.delta,
                tol_x: common.tol_x,
                ..Default::default()
            };
            let r = minimize_geometric(&f, lo, hi, &gopts).map_err(|e| e.to_string())?;
            rows.push(CompareRow {
                method: "geometric".into(),
                x_hat: r.x_hat,
                evaluations: r.evaluations,
                iterations: r.iterations as u64,
                wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
            });
            let t0 = Instant::now();
            let evals = std::sync::Arc::new(std::sync::atomic::AtomicU64::new(0));
            let counted = {
                let f = f.clone();
                let evals = evals.clone();
                ScalarFn::new(f.name.clone(), f.domain, f.convexity_class, None, move |x| {
                    evals.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    f.eval(x)
                })
            };
            // golden-section stops on x-width like the bisection runs do
            let (xg, _) = golden_section_min(&counted, lo, hi, common.delta)
                .map_err(|e| e.to_string())?;
            let golden_evals = evals.load(std::sync::atomic::Ordering::Relaxed);
            rows.push(CompareRow {
                method: "golden".into(),
                x_hat: xg,
                evaluations: golden_evals,
                // one new point per shrink after the two seeds and final midpoint
                iterations: golden_evals.saturating_sub(3),
                wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
            });
            let run = RunReport {
                schema_version: SCHEMA_VERSION,
                config: config_echo(&common, lo, hi, None, Some(eps), None, vec![]),
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                result: RunResult::Compare(CompareTable::new(verdict.into(), rows)),
            };
            emit(&common, &run)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => usage_error(&msg),
    }
}
