//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 invalid state data. Omitting `--seed` uses seed 0.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::analytic::{self, Spectrum};
use crate::error::Error;
use crate::measures;
use crate::optimize::{self, Measure, OptimizationResult, SimplexOptions};
use crate::rng::{Seed, Stream};
use crate::states::{self, DensityMatrix, StateFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_STATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "concneg",
    version,
    about = "Two-qubit concurrence and negativity toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print concurrence, negativity, entanglement of formation and participation ratio.
    Measures {
        /// JSON state file: {"rho": 4x4 array of [re, im] pairs}
        file: PathBuf,
    },
    /// Run a Monte-Carlo verification suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit curve data as CSV.
    Curve {
        /// 1: gap against participation ratio, 2: gap against concurrence
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        #[arg(long)]
        step: f64,
        /// Add the optimizer's value at every grid point.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximize C - E_N at fixed participation ratio or fixed concurrence.
    Optimize {
        #[arg(
            long = "fix-r",
            conflicts_with = "fix_c",
            required_unless_present = "fix_c"
        )]
        fix_r: Option<f64>,
        #[arg(long = "fix-c")]
        fix_c: Option<f64>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximize a measure over the unitary orbit of a spectrum.
    OrbitMax {
        /// Four comma-separated eigenvalues summing to one.
        #[arg(long, value_delimiter = ',', required = true)]
        spectrum: Vec<f64>,
        #[arg(long)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// E_N <= C on random mixed states of every rank.
    Inequality,
    /// C = E_N = 2|det psi~| on Haar pure states.
    Pure,
    /// C = E_N on the equality-class generator.
    EqualityClass,
    /// C = E_N = 0 on states with R > 3.
    #[value(name = "separable-r3")]
    #[serde(rename = "separable-r3")]
    SeparableR3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    #[value(name = "C")]
    C,
    #[value(name = "EN")]
    En,
}

/// Result of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Tolerance of each suite.
pub fn suite_tolerance(suite: Suite) -> f64 {
    match suite {
        Suite::Inequality | Suite::Pure | Suite::SeparableR3 => 1e-10,
        Suite::EqualityClass => 1e-8,
    }
}

const EQUALITY_CLASS_SIZES: [usize; 4] = [1, 2, 4, 8];

/// Violation measured on sample `i`.
fn suite_violation(suite: Suite, seed: Seed, i: usize) -> f64 {
    let s = seed.child(i as u64);
    match suite {
        Suite::Inequality => {
            let rho = states::random_mixed(s, i % 4 + 1).expect("rank in range");
            measures::negativity(&rho) - measures::concurrence(&rho)
        }
        Suite::Pure => {
            let psi = states::random_pure(s);
            let rho = psi.density();
            let (c, n) = (measures::concurrence(&rho), measures::negativity(&rho));
            let t = psi.tilde();
            let det = (t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)]).norm();
            // the determinant identity has its own, tighter tolerance
            let det_excess = ((n - 2.0 * det).abs() - 1e-12).max(0.0);
            (c - n).abs() + det_excess * 1e6
        }
        Suite::EqualityClass => {
            let k = EQUALITY_CLASS_SIZES[i % EQUALITY_CLASS_SIZES.len()];
            let rho = states::equality_class_state(s, k).expect("k >= 1");
            (measures::concurrence(&rho) - measures::negativity(&rho)).abs()
        }
        Suite::SeparableR3 => {
            let rho = sample_high_r(s);
            measures::concurrence(&rho).max(measures::negativity(&rho))
        }
    }
}

/// A random state with participation ratio above 3: Dirichlet spectra filtered
/// to `R > 3`, rotated by a Haar unitary.
pub fn sample_high_r(seed: Seed) -> DensityMatrix {
    let mut rng = seed.stream(Stream::Spectrum, 0);
    loop {
        let w = states::dirichlet_weights(&mut rng, 4);
        let spectrum = Spectrum::new([w[0], w[1], w[2], w[3]]).expect("simplex point");
        if spectrum.participation_ratio() > 3.0 {
            return states::sample_fixed_spectrum(&mut rng, &spectrum);
        }
    }
}

pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> SuiteSummary {
    let tolerance = suite_tolerance(suite);
    let violations: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| suite_violation(suite, Seed(seed), i))
        .collect();
    let max_violation = violations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let count = violations.iter().filter(|&&v| v > tolerance).count();
    SuiteSummary {
        suite,
        samples,
        seed,
        max_violation,
        tolerance,
        violations: count,
        pass: samples > 0 && count == 0,
    }
}

/// One row of curve output.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub abscissa: f64,
    pub analytic: f64,
    pub numeric: Option<f64>,
    pub restarts: usize,
    pub residual: Option<f64>,
}

/// Grid `lo, lo + step, …` up to `hi` inclusive (within round-off).
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect()
}

pub fn curve_rows(
    figure: u8,
    step: f64,
    numeric: bool,
    opts: &SimplexOptions,
) -> crate::Result<Vec<CurveRow>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidOptions(format!(
            "step must be positive, got {step}"
        )));
    }
    let (lo, hi) = match figure {
        1 => (1.0, 4.0),
        2 => (0.0, 1.0),
        _ => return Err(Error::InvalidOptions(format!("unknown figure {figure}"))),
    };
    grid(lo, hi, step)
        .into_iter()
        .map(|x| {
            let analytic = if figure == 1 {
                analytic::me_gap_envelope(x)?
            } else {
                analytic::max_gap_vs_c(x)?.0
            };
            let (numeric, residual) = if numeric {
                let res = if figure == 1 {
                    optimize::max_gap_fixed_r(x, opts)?
                } else {
                    optimize::max_gap_fixed_c(x, opts)?
                };
                (Some(res.objective), Some(res.constraint_residual))
            } else {
                (None, None)
            };
            Ok(CurveRow {
                abscissa: x,
                analytic,
                restarts: if numeric.is_some() { opts.restarts } else { 0 },
                numeric,
                residual,
            })
        })
        .collect()
}

/// Rounds to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest round-trip text of `x` rounded to 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        // normalizes -0
        return "0".into();
    }
    format!("{r}")
}

pub fn write_curve_csv<W: Write>(figure: u8, rows: &[CurveRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let numeric = rows.first().is_some_and(|r| r.numeric.is_some());
    let first = if figure == 1 { "R" } else { "C" };
    let second = if figure == 1 { "analytic" } else { "gap" };
    if numeric {
        w.write_record([first, second, "numeric", "residual"])?;
    } else {
        w.write_record([first, second])?;
    }
    for r in rows {
        let mut rec = vec![fmt_num(r.abscissa), fmt_num(r.analytic)];
        if let (Some(n), Some(res)) = (r.numeric, r.residual) {
            rec.push(fmt_num(n));
            rec.push(fmt_num(res));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn rounded_report(r: &measures::EntanglementReport) -> serde_json::Value {
    json!({
        "concurrence": round_sig(r.concurrence),
        "negativity": round_sig(r.negativity),
        "eof": round_sig(r.eof),
        "participation_ratio": round_sig(r.participation_ratio),
    })
}

fn result_json(res: &OptimizationResult) -> serde_json::Value {
    let mut ev = res.best_state.eigenvalues();
    ev.reverse();
    json!({
        "objective": round_sig(res.objective),
        "constraint_residual": res.constraint_residual,
        "feasible": res.feasible,
        "restarts_used": res.restarts_used,
        "iterations_total": res.iterations_total,
        "eigenvalues": ev.into_iter().map(round_sig).collect::<Vec<_>>(),
        "measures": rounded_report(&measures::report(&res.best_state)),
        "state": StateFile::from_state(&res.best_state),
    })
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::InvalidOptions(_) | Error::OutOfRange { .. } => EXIT_USAGE,
        Error::InvalidSpectrum(_) => EXIT_USAGE,
        Error::NoFeasibleRestart { .. } => EXIT_FAILED,
        _ => EXIT_INVALID_STATE,
    }
}

fn options(restarts: usize, seed: u64) -> SimplexOptions {
    SimplexOptions::default()
        .with_restarts(restarts)
        .with_seed(Seed(seed))
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

fn execute<O: Write>(command: Command, out: &mut O) -> crate::Result<i32> {
    let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
    match command {
        Command::Measures { file } => {
            let rho = states::read_state_file(&file)?;
            let report = measures::report(&rho);
            writeln!(out, "{}", rounded_report(&report)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            samples,
            seed,
        } => {
            if samples == 0 {
                return Err(Error::InvalidOptions("samples must be at least 1".into()));
            }
            let summary = run_suite(suite, samples, seed);
            writeln!(
                out,
                "{}",
                serde_json::to_string(&summary).expect("serializable")
            )
            .map_err(io)?;
            Ok(if summary.pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Curve {
            figure,
            step,
            numeric,
            restarts,
            seed,
        } => {
            let rows = curve_rows(figure, step, numeric, &options(restarts, seed))?;
            write_curve_csv(figure, &rows, &mut *out)
                .map_err(|e| Error::Parse(format!("write failed: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::Optimize {
            fix_r,
            fix_c,
            restarts,
            seed,
        } => {
            let opts = options(restarts, seed);
            let value = match (fix_r, fix_c) {
                (Some(r), _) => {
                    let res = optimize::max_gap_fixed_r(r, &opts)?;
                    let mut v = result_json(&res);
                    v["target"] = json!({"participation_ratio": r});
                    v["analytic"] = json!(round_sig(analytic::me_gap_envelope(r)?));
                    v
                }
                (None, Some(c)) => {
                    let res = optimize::max_gap_fixed_c(c, &opts)?;
                    let mut v = result_json(&res);
                    v["target"] = json!({"concurrence": c});
                    v["analytic"] = json!(round_sig(analytic::max_gap_vs_c(c)?.0));
                    v
                }
                (None, None) => {
                    return Err(Error::InvalidOptions(
                        "one of --fix-r / --fix-c is required".into(),
                    ))
                }
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&value).expect("json")
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::OrbitMax {
            spectrum,
            measure,
            restarts,
            seed,
        } => {
            let values: [f64; 4] = spectrum.as_slice().try_into().map_err(|_| {
                Error::InvalidOptions(format!("expected 4 eigenvalues, got {}", spectrum.len()))
            })?;
            let lam = Spectrum::new(values)?;
            let (measure, analytic) = match measure {
                MeasureArg::C => (Measure::Concurrence, analytic::me_concurrence(&lam)),
                MeasureArg::En => (Measure::Negativity, analytic::me_negativity(&lam)),
            };
            let res = optimize::orbit_maximize(&lam, measure, &options(restarts, seed))?;
            let mut v = result_json(&res);
            v["spectrum"] = json!(lam.values());
            v["analytic"] = json!(round_sig(analytic));
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("concneg").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(grid(1.0, 4.0, 1.0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(grid(0.0, 1.0, 0.5), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(0.0, 1.0, 0.1).len(), 11);
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.9999999999999998), "1");
        assert_eq!(fmt_num(1.0 - 0.5f64.sqrt()), "0.292893218813452");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn unknown_suite_is_usage_error() {
        let (code, _, err) = run_capture(&["verify", "bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("bogus"));
    }

    #[test]
    fn bad_step_is_usage_error() {
        assert_eq!(
            run_capture(&["curve", "--figure", "1", "--step", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_capture(&["curve", "--figure", "3", "--step", "1"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn small_suites_pass() {
        for suite in [
            Suite::Inequality,
            Suite::Pure,
            Suite::EqualityClass,
            Suite::SeparableR3,
        ] {
            let s = run_suite(suite, 200, 1);
            assert!(s.pass, "{s:?}");
        }
    }
}
