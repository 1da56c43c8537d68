//! End-to-end convergence experiments: densities of `Z_n = S_n/b_n - a_n`,
//! the relative entropies `D_n = D(Z_n‖Z)` and `D̃_n = D(p̃_n‖ψ)`, and the
//! checks built on them.

mod bounds;
mod config;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bounds::{bound_6_3, bound_6_3_with, bound_6_5, bound_6_5_min, c_eps, Target, BOUND_T_GRID};
pub use config::{Centering, ExperimentConfig, GridSpec, NormalizerSpec, SourceSpec, SCHEMA_VERSION};

use crate::decomposition::{eps_n, modified_density, split, SplitResult};
use crate::error::{Error, Result};
use crate::format::sig;
use crate::grid_density::GridDensity;
use crate::tolerances::Tolerances;

/// Header of the CSV written by [`write_rows_csv`].
pub const CSV_HEADER: [&str; 7] = ["n", "D_n", "D_tilde_n", "sup_llt", "bound_6_3", "lemma41_gap", "cf_envelope_ok"];

/// Slack allowed in the convexity sandwich around `D_n`.
pub const CONVEXITY_SLACK: f64 = 1e-6;

/// Number of frequencies sampled by [`cf_envelope_check`].
pub const ENVELOPE_POINTS: usize = 64;

/// `b_n = scale_const·n^{1/α}`, `a_n = 0` or `n·E X/b_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizerSequence {
    pub alpha: f64,
    pub scale_const: f64,
    pub centering: Centering,
    /// `E X_1`, used by [`Centering::MeanShift`].
    pub mean: f64,
}

impl NormalizerSequence {
    pub fn new(alpha: f64, scale_const: f64, centering: Centering, mean: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0 && scale_const > 0.0 && mean.is_finite()) {
            return Err(Error::invalid(format!("normalizer alpha = {alpha}, scale = {scale_const}")));
        }
        Ok(NormalizerSequence { alpha, scale_const, centering, mean })
    }

    /// `(a_n, b_n)`.
    pub fn at(&self, n: usize) -> (f64, f64) {
        let b = self.scale_const * (n as f64).powf(1.0 / self.alpha);
        let a = match self.centering {
            Centering::Zero => 0.0,
            Centering::MeanShift => n as f64 * self.mean / b,
        };
        (a, b)
    }

    pub fn values(&self, ns: &[usize]) -> BTreeMap<usize, (f64, f64)> {
        ns.iter().map(|&n| (n, self.at(n))).collect()
    }

    /// Normal-attraction constants for the configured source and target:
    /// matched variances for a normal target, matched mean tail
    /// coefficients otherwise. An explicit `scale_const` wins.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let target = cfg.target;
        let alpha = target.alpha;
        let mean = match cfg.normalizer.centering {
            Centering::Zero => 0.0,
            Centering::MeanShift => source_mean(&cfg.source)
                .ok_or_else(|| Error::Config(format!("{:?} has no finite mean to shift by", cfg.source)))?,
        };
        let scale = match cfg.normalizer.scale_const {
            Some(s) => s,
            None if target.is_normal() => {
                let var = source_variance(&cfg.source).ok_or_else(|| {
                    Error::Config(format!("{:?} is not in the normal domain of attraction", cfg.source))
                })?;
                (var / (2.0 * target.c)).sqrt()
            }
            None => {
                let same_alpha = match cfg.source {
                    SourceSpec::Stable(p) => p.alpha == alpha,
                    SourceSpec::Pareto { alpha: a } => a == alpha,
                    _ => false,
                };
                if !same_alpha {
                    return Err(Error::Config(format!(
                        "{:?} is not in the normal domain of attraction of an alpha = {alpha} law",
                        cfg.source
                    )));
                }
                match cfg.source {
                    SourceSpec::Stable(p) if p.beta == target.beta => (p.c / target.c).powf(1.0 / alpha),
                    src => {
                        let c_src = src.tail_coefficient()?.expect("heavy-tailed source");
                        let c_tgt = SourceSpec::Stable(target).tail_coefficient()?.expect("non-normal target");
                        (c_src / c_tgt).powf(1.0 / alpha)
                    }
                }
            }
        };
        Self::new(alpha, scale, cfg.normalizer.centering, mean)
    }
}

fn source_mean(s: &SourceSpec) -> Option<f64> {
    match *s {
        SourceSpec::Uniform { low, high } => Some(0.5 * (low + high)),
        SourceSpec::Normal { mean, .. } => Some(mean),
        SourceSpec::Stable(p) if p.alpha > 1.0 => Some(p.a),
        SourceSpec::Pareto { alpha } if alpha > 1.0 => Some(0.0),
        _ => None,
    }
}

fn source_variance(s: &SourceSpec) -> Option<f64> {
    match *s {
        SourceSpec::Uniform { low, high } => Some((high - low).powi(2) / 12.0),
        SourceSpec::Normal { sd, .. } => Some(sd * sd),
        SourceSpec::Stable(p) if p.is_normal() => Some(2.0 * p.c),
        _ => None,
    }
}

/// `T_n = √(2 log log(n + e²))`, a slowly growing cut point added to the
/// scan of [`bound_6_5`].
pub fn t_schedule(n: usize) -> f64 {
    (2.0 * (n as f64 + std::f64::consts::E.powi(2)).ln().ln()).sqrt()
}

/// Density of `Z_n = S_n/b_n - a_n`.
pub fn zn_density(source: &GridDensity, n: usize, norm: &NormalizerSequence, tol: &Tolerances) -> Result<GridDensity> {
    let (a, b) = norm.at(n);
    source.convolve_power(n, tol)?.affine(a, b)
}

/// Least-squares slope of `-log p` against `log|x|` over the nodes with
/// `|x| >= from`: the fitted tail exponent of `p`.
pub fn fit_tail_exponent(p: &GridDensity, from: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = p
        .nodes()
        .filter(|&(x, v)| x.abs() >= from && v > 0.0)
        .map(|(x, v)| (x.abs().ln(), -v.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::invalid(format!("only {} positive nodes beyond |x| = {from}", pts.len())));
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfEnvelope {
    /// Largest `c` with `|f_n(t)| <= exp(-c|t|^{α/2})` at every sampled `t`.
    pub c_fit: f64,
    pub ok: bool,
    /// The requested band `t0·b_n` exceeded the grid's resolvable band and
    /// was cut to it.
    pub band_truncated: bool,
}

/// Fits the envelope `|f_n(t)| <= exp(-c|t|^{α/2})` on `ENVELOPE_POINTS`
/// log-spaced `t` in `[10^{-3}·t0·b_n, t0·b_n]`, using
/// `|f_n(t)| = |p̂(t/b_n)|^n`.
pub fn cf_envelope_check(source: &GridDensity, norm: &NormalizerSequence, n: usize, t0: f64) -> Result<CfEnvelope> {
    if n == 0 || !(t0 > 0.0) {
        return Err(Error::invalid("envelope check needs n >= 1 and t0 > 0"));
    }
    let (_, b) = norm.at(n);
    let limit = std::f64::consts::PI / source.dx() * (1.0 - 1e-9);
    let band_truncated = t0 > limit;
    let u_hi = t0.min(limit);
    let mass = source.cf(0.0)?.norm();
    let mut c_fit = f64::INFINITY;
    for k in 0..ENVELOPE_POINTS {
        let u = u_hi * 1e-3f64.powf(1.0 - k as f64 / (ENVELOPE_POINTS - 1) as f64);
        let modulus = source.cf(u)?.norm() / mass;
        let t = u * b;
        c_fit = c_fit.min(-(n as f64) * modulus.ln() / t.powf(0.5 * norm.alpha));
    }
    Ok(CfEnvelope { c_fit, ok: c_fit > 0.0, band_truncated })
}

/// One line of a convergence run. Failed rows carry NaN values and the
/// error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    #[serde(rename = "D_n")]
    pub d_n: f64,
    #[serde(rename = "D_tilde_n")]
    pub d_tilde_n: f64,
    /// `sup |p̃_n - ψ|` over the grid of `p̃_n`.
    pub sup_llt: f64,
    /// Upper bound on `D̃_n`: the power-weighted bound for non-normal
    /// targets, the cut-point bound minimized over `T` for normal ones.
    pub bound_6_3: f64,
    pub lemma41_gap: f64,
    pub cf_envelope_ok: bool,
    pub a_n: f64,
    pub b_n: f64,
    pub eps_n: f64,
    #[serde(rename = "D_n0")]
    pub d_n0: Option<f64>,
    /// Minimizing cut point, normal targets only.
    pub bound_t: Option<f64>,
    pub cf_c_fit: f64,
    pub cf_band_truncated: bool,
    pub convexity_ok: bool,
    pub error: Option<String>,
}

impl ConvergenceRow {
    fn failed(n: usize, norm: &NormalizerSequence, b: f64, e: &Error) -> Self {
        let (a_n, b_n) = norm.at(n);
        ConvergenceRow {
            n,
            d_n: f64::NAN,
            d_tilde_n: f64::NAN,
            sup_llt: f64::NAN,
            bound_6_3: f64::NAN,
            lemma41_gap: f64::NAN,
            cf_envelope_ok: false,
            a_n,
            b_n,
            eps_n: eps_n(b, n),
            d_n0: None,
            bound_t: None,
            cf_c_fit: f64::NAN,
            cf_band_truncated: false,
            convexity_ok: false,
            error: Some(e.to_string()),
        }
    }
}

/// `p_n`, `p̃_n` and (for `n >= 2`) `p_{n0}` in the normalized frame.
#[derive(Debug, Clone)]
pub struct RowDensities {
    pub n: usize,
    pub a_n: f64,
    pub b_n: f64,
    pub eps_n: f64,
    pub p_n: GridDensity,
    pub tilde_p_n: GridDensity,
    pub p_n0: Option<GridDensity>,
}

/// A validated configuration with its source grid, split and target.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    norm: NormalizerSequence,
    source: GridDensity,
    split: SplitResult,
    target: Target,
    tol: Tolerances,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        Self::with_tolerances(config, Tolerances::default())
    }

    pub fn with_tolerances(config: ExperimentConfig, tol: Tolerances) -> Result<Self> {
        config.validate()?;
        let norm = NormalizerSequence::from_config(&config)?;
        let source = config.source.density(&config.grid)?;
        let split = split(&source, config.split_b)?;
        let target = Target::new(config.target)?;
        Ok(Experiment { config, norm, source, split, target, tol })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn normalizer(&self) -> &NormalizerSequence {
        &self.norm
    }

    pub fn source(&self) -> &GridDensity {
        &self.source
    }

    pub fn split(&self) -> &SplitResult {
        &self.split
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// `p̃_1 := p_1`; for `n >= 2` the binomial decomposition of the split.
    pub fn densities(&self, n: usize) -> Result<RowDensities> {
        let (a_n, b_n) = self.norm.at(n);
        if n == 1 {
            let p = zn_density(&self.source, 1, &self.norm, &self.tol)?;
            return Ok(RowDensities { n, a_n, b_n, eps_n: 1.0, p_n: p.clone(), tilde_p_n: p, p_n0: None });
        }
        let pair = modified_density(&self.split, n, a_n, b_n, &self.tol)?;
        Ok(RowDensities {
            n,
            a_n,
            b_n,
            eps_n: pair.eps_n,
            p_n: pair.p_n,
            tilde_p_n: pair.tilde_p_n,
            p_n0: Some(pair.p_n0),
        })
    }

    /// `D(p‖ψ)` against the target.
    pub fn relative_entropy(&self, p: &GridDensity) -> f64 {
        p.relative_entropy(self.target.reference())
    }

    /// Upper bound on `D(p̃_n‖ψ)` and, for normal targets, the minimizing
    /// cut point (scanned over [`BOUND_T_GRID`] and `T_n`).
    pub fn entropy_bound(&self, p_tilde: &GridDensity, n: usize, eps: f64) -> Result<(f64, Option<f64>)> {
        let t = self.target.params();
        if !t.is_normal() {
            return Ok((bound_6_3_with(p_tilde, &self.target, eps)?, None));
        }
        // standardize: D is invariant under a common affine map
        let sd = (2.0 * t.c).sqrt();
        let std = p_tilde.affine(t.a / sd, sd)?;
        let m = std.peak();
        let (best, at) = bound_6_5_min(&std, m)?;
        let t_n = t_schedule(n);
        let at_schedule = bound_6_5(&std, t_n, m)?;
        Ok(if at_schedule < best { (at_schedule, Some(t_n)) } else { (best, Some(at)) })
    }

    fn try_row(&self, n: usize) -> Result<ConvergenceRow> {
        let d = self.densities(n)?;
        let d_n = self.relative_entropy(&d.p_n);
        let (d_tilde_n, d_n0) = match &d.p_n0 {
            Some(p0) => (self.relative_entropy(&d.tilde_p_n), Some(self.relative_entropy(p0))),
            None => (d_n, None),
        };
        let convexity_ok = match d_n0 {
            None => true,
            Some(d0) => {
                let e = d.eps_n;
                let mix = (1.0 - e) * d_tilde_n + e * d0;
                let lower = mix + e * e.ln() + (1.0 - e) * (1.0 - e).ln();
                d_n <= mix + CONVEXITY_SLACK && d_n >= lower - CONVEXITY_SLACK
            }
        };
        let sup_llt = self.target.sup_gap(&d.tilde_p_n);
        let (bound, bound_t) = self.entropy_bound(&d.tilde_p_n, n, self.config.eps)?;
        let env = cf_envelope_check(&self.source, &self.norm, n, self.config.t0)?;
        Ok(ConvergenceRow {
            n,
            d_n,
            d_tilde_n,
            sup_llt,
            bound_6_3: bound,
            lemma41_gap: (d_tilde_n - d_n).abs(),
            cf_envelope_ok: env.ok,
            a_n: d.a_n,
            b_n: d.b_n,
            eps_n: d.eps_n,
            d_n0,
            bound_t,
            cf_c_fit: env.c_fit,
            cf_band_truncated: env.band_truncated,
            convexity_ok,
            error: None,
        })
    }

    /// The row for `n`; numerical failures are recorded in `error`.
    pub fn row(&self, n: usize) -> ConvergenceRow {
        self.try_row(n).unwrap_or_else(|e| ConvergenceRow::failed(n, &self.norm, self.config.split_b, &e))
    }

    /// Rows for every configured `n` in ascending order, computed in
    /// parallel.
    pub fn run(&self) -> Vec<ConvergenceRow> {
        self.config.sorted_n().par_iter().map(|&n| self.row(n)).collect()
    }
}

/// Validates `config`, builds the experiment and runs every row.
pub fn run_convergence(config: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    Ok(Experiment::new(config.clone())?.run())
}

/// `|D̃_n - D_n| < max(2^{-n}, 10·quadrature_tol)`.
pub fn lemma_4_1_check(row: &ConvergenceRow, n: usize, tol: &Tolerances) -> bool {
    row.lemma41_gap < 0.5f64.powi(n as i32).max(10.0 * tol.quadrature_tol)
}

/// Values at or below this count as the numerical floor in [`llt_check`].
pub const LLT_FLOOR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LltTrend {
    /// Rows where `sup_llt` rose by more than 10% over the previous row.
    pub violations: Vec<usize>,
    /// `final / first`.
    pub ratio: f64,
    /// Every value is at the numerical floor.
    pub at_floor: bool,
    pub pass: bool,
    pub note: Option<String>,
}

/// Checks that `sup_llt` is nonincreasing up to 10% and ends below a tenth
/// of its first value, or sits at the numerical floor throughout.
pub fn llt_check(rows: &[ConvergenceRow]) -> LltTrend {
    let v: Vec<f64> = rows.iter().map(|r| r.sup_llt).collect();
    trend_check(&v, rows.iter().map(|r| r.n).collect(), LLT_FLOOR)
}

/// Same rule as [`llt_check`] applied to `D_n`.
pub fn entropy_trend_check(rows: &[ConvergenceRow]) -> LltTrend {
    let v: Vec<f64> = rows.iter().map(|r| r.d_n).collect();
    trend_check(&v, rows.iter().map(|r| r.n).collect(), LLT_FLOOR)
}

fn trend_check(v: &[f64], ns: Vec<usize>, floor: f64) -> LltTrend {
    if v.len() < 4 || v.iter().any(|x| !x.is_finite()) {
        return LltTrend {
            violations: Vec::new(),
            ratio: f64::NAN,
            at_floor: false,
            pass: false,
            note: Some(format!("needs at least 4 finite rows, got {} values", v.len())),
        };
    }
    let violations: Vec<usize> = (1..v.len()).filter(|&i| v[i] > 1.1 * v[i - 1]).map(|i| ns[i]).collect();
    let ratio = v[v.len() - 1] / v[0];
    let at_floor = v.iter().all(|&x| x <= floor);
    let pass = at_floor || (violations.is_empty() && ratio < 0.1);
    LltTrend { violations, ratio, at_floor, pass, note: None }
}

/// Writes the fixed-header CSV with nine significant digits.
pub fn write_rows_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            sig(r.d_n),
            sig(r.d_tilde_n),
            sig(r.sup_llt),
            sig(r.bound_6_3),
            sig(r.lemma41_gap),
            r.cf_envelope_ok.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back the seven CSV columns (extras are NaN / `None`).
pub fn read_rows_csv<R: std::io::Read>(input: R) -> Result<Vec<ConvergenceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |m: String| Error::Io(m);
    let header: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| -> Result<f64> {
        match s {
            "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => s.parse().map_err(|_| bad(format!("bad number {s:?}"))),
        }
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| num(&rec[i]);
        rows.push(ConvergenceRow {
            n: rec[0].parse().map_err(|_| bad(format!("bad n {:?}", &rec[0])))?,
            d_n: f(1)?,
            d_tilde_n: f(2)?,
            sup_llt: f(3)?,
            bound_6_3: f(4)?,
            lemma41_gap: f(5)?,
            cf_envelope_ok: &rec[6] == "true",
            a_n: f64::NAN,
            b_n: f64::NAN,
            eps_n: f64::NAN,
            d_n0: None,
            bound_t: None,
            cf_c_fit: f64::NAN,
            cf_band_truncated: false,
            convexity_ok: false,
            error: None,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests;
