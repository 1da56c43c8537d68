//! Command-line front end. `run` parses arguments, executes one
//! subcommand and returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::convergence_lab::{write_rows_csv, Experiment, ExperimentConfig};
use crate::decomposition::{fit_cf_tail_decay, modified_density, section3_checks, CheckReport, DecayFit};
use crate::entropy_criteria::{finiteness_diagnosis, FinitenessReport};
use crate::error::{Error, Result};
use crate::format::sig;
use crate::mc_oracle::{crosscheck, CrossCheck};
use crate::stable_law::{sample, StableDensity, StableParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Caps the worker threads; `0` or unset lets rayon decide.
pub const THREADS_ENV: &str = "STABLE_ENTROPY_THREADS";

/// Largest `n` used by `crosscheck` when `--n` is not given.
const CROSSCHECK_MAX_N: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "stable-entropy", version, about = "Entropic convergence of normalized sums to stable laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct LawArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
}

impl LawArgs {
    fn params(&self) -> Result<StableParams> {
        StableParams::new(self.alpha, self.beta, self.c, self.a).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CSV `x,pdf` of a stable density on evenly spaced points.
    Pdf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stable draws, one per line.
    Sample {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split summary and the bound checks of the binomial decomposition.
    Decompose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        /// Weight exponent of the weighted L1 check.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Also fit the decay of the characteristic-function tail over
        /// n = 4, 6, …, 24.
        #[arg(long)]
        fit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finiteness report of the source density against the target.
    Diagnose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence rows as CSV.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid values against Monte-Carlo estimates.
    Crosscheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Defaults to the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Values of n (default: those in the config up to 16).
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct SplitSummary {
    b: f64,
    level: f64,
    m_bound: f64,
    rho1_mass: f64,
    rho0_mass: f64,
}

#[derive(Debug, Serialize)]
struct DecomposeOutput {
    n: usize,
    a_n: f64,
    b_n: f64,
    split: SplitSummary,
    check: CheckReport,
    fit: Option<DecayFit>,
}

/// Rounds every number to nine significant digits.
fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => {
                sig(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
            }
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&round_numbers(value)).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn load(path: &Path) -> Result<Experiment> {
    Experiment::new(ExperimentConfig::from_path(path)?)
}

fn pdf_csv(params: &StableParams, x_min: f64, x_max: f64, points: usize) -> Result<String> {
    if points == 0 || !(x_min <= x_max) || (points > 1 && x_min == x_max) {
        return Err(Error::Config("pdf needs points >= 1 and x_min < x_max (or x_min = x_max with one point)".into()));
    }
    let density = StableDensity::new(*params)?;
    let step = if points > 1 { (x_max - x_min) / (points - 1) as f64 } else { 0.0 };
    let rows: Vec<String> = (0..points)
        .into_par_iter()
        .map(|j| {
            let x = if j + 1 == points && points > 1 { x_max } else { x_min + j as f64 * step };
            density.pdf(x).map(|v| format!("{},{}\n", sig(x), sig(v)))
        })
        .collect::<Result<_>>()?;
    Ok(std::iter::once("x,pdf\n".to_string()).chain(rows).collect())
}

fn decompose(path: &Path, n: usize, s: f64, fit: bool) -> Result<DecomposeOutput> {
    let exp = load(path)?;
    if n < 2 {
        return Err(Error::Config("decompose needs n >= 2".into()));
    }
    let (a_n, b_n) = exp.normalizer().at(n);
    let t0 = exp.config().t0;
    let pair = modified_density(exp.split(), n, a_n, b_n, exp.tolerances())?;
    let fit = if fit {
        let points: Vec<(usize, f64, f64)> = (2..=12)
            .into_par_iter()
            .map(|k| {
                let m = 2 * k;
                let (a, b) = exp.normalizer().at(m);
                let p = modified_density(exp.split(), m, a, b, exp.tolerances())?;
                Ok((m, b, p.cf_tail_integral(t0)))
            })
            .collect::<Result<_>>()?;
        Some(fit_cf_tail_decay(&points)?)
    } else {
        None
    };
    let split = exp.split();
    Ok(DecomposeOutput {
        n,
        a_n,
        b_n,
        split: SplitSummary {
            b: split.b,
            level: split.level,
            m_bound: split.m_bound,
            rho1_mass: split.rho1.mass(),
            rho0_mass: split.rho0.mass(),
        },
        check: section3_checks(split, &pair, s, t0, fit),
        fit,
    })
}

fn diagnose(path: &Path) -> Result<FinitenessReport> {
    let exp = load(path)?;
    finiteness_diagnosis(exp.source(), &exp.config().target)
}

fn crosschecks(path: &Path, m: usize, seed: Option<u64>, ns: &[usize]) -> Result<Vec<CrossCheck>> {
    let exp = load(path)?;
    let seed = seed.unwrap_or(exp.config().seed);
    let ns: Vec<usize> = if ns.is_empty() {
        exp.config().sorted_n().into_iter().filter(|&n| n <= CROSSCHECK_MAX_N).collect()
    } else {
        ns.to_vec()
    };
    if ns.contains(&0) {
        return Err(Error::Config("n must be >= 1".into()));
    }
    ns.iter().map(|&n| crosscheck(&exp, n, m, seed)).collect()
}

fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Pdf { law, x_min, x_max, points, out } => {
            emit(out, pdf_csv(&law.params()?, *x_min, *x_max, *points)?.as_bytes())
        }
        Command::Sample { law, count, seed, out } => {
            let xs = sample(&law.params()?, *count, *seed)?;
            let text: String = std::iter::once("x\n".to_string()).chain(xs.iter().map(|x| sig(*x) + "\n")).collect();
            emit(out, text.as_bytes())
        }
        Command::Decompose { config, n, s, fit, out } => emit(out, to_json(&decompose(config, *n, *s, *fit)?)?.as_bytes()),
        Command::Diagnose { config, out } => emit(out, to_json(&diagnose(config)?)?.as_bytes()),
        Command::Converge { config, out } => {
            let rows = load(config)?.run();
            let mut buf = Vec::new();
            write_rows_csv(&rows, &mut buf)?;
            emit(out, &buf)
        }
        Command::Crosscheck { config, samples, seed, n, out } => {
            emit(out, to_json(&crosschecks(config, *samples, *seed, n)?)?.as_bytes())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV} = {v:?} is not a count")))?;
    if threads > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

/// Exit code for an error: 2 for configuration problems, 3 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

/// Runs one command; errors go to stderr as JSON.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| execute(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let body = serde_json::json!({ "error": e, "message": e.to_string() });
            eprintln!("{body}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_pdf_at_zero() {
        let p = StableParams::cauchy();
        assert_eq!(pdf_csv(&p, 0.0, 0.0, 1).unwrap(), "x,pdf\n0,0.318309886\n");
        assert!(matches!(pdf_csv(&p, 1.0, 0.0, 3), Err(Error::Config(_))));
    }

    #[test]
    fn rounding_keeps_integers() {
        let v = serde_json::json!({"n": 16, "x": 0.1234567891234, "v": [1.0e-20, 2.5]});
        assert_eq!(round_numbers(v).to_string(), r#"{"n":16,"v":[1e-20,2.5],"x":0.123456789}"#);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["stable-entropy", "frobnicate"]), 2);
        assert_eq!(run(["stable-entropy", "pdf", "--alpha", "3", "--x-min", "0", "--x-max", "0", "--points", "1"]), 2);
    }
}
