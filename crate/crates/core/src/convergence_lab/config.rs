//! Experiment configuration and source laws.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_density::GridDensity;
use crate::stable_law::{classify, open_unit, sample_with, StableClass, StableDensity, StableParams};

/// Version accepted by [`ExperimentConfig::from_json`].
pub const SCHEMA_VERSION: u32 = 1;

/// Law of the summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, sd: f64 },
    Stable(StableParams),
    /// `(α/2)|x|^{-(1+α)}` on `|x| >= 1`.
    Pareto { alpha: f64 },
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SourceSpec::Uniform { low, high } => low < high && low.is_finite() && high.is_finite(),
            SourceSpec::Normal { mean, sd } => sd > 0.0 && mean.is_finite() && sd.is_finite(),
            SourceSpec::Stable(p) => p.validate().is_ok() && classify(&p) != StableClass::Extremal,
            SourceSpec::Pareto { alpha } => alpha > 0.0 && alpha < 2.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid source {self:?}")))
        }
    }

    /// Density on the grid, with a tail model for heavy-tailed laws.
    pub fn density(&self, grid: &GridSpec) -> Result<GridDensity> {
        let GridSpec { x_min, x_max, n_points } = *grid;
        match *self {
            SourceSpec::Uniform { low, high } => {
                let h = 1.0 / (high - low);
                GridDensity::from_function(move |x| if x >= low && x < high { h } else { 0.0 }, x_min, x_max, n_points)
            }
            SourceSpec::Normal { mean, sd } => GridDensity::from_function(
                move |x| (-0.5 * ((x - mean) / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()),
                x_min,
                x_max,
                n_points,
            ),
            SourceSpec::Stable(p) => GridDensity::from_stable(&p, x_min, x_max, n_points),
            SourceSpec::Pareto { alpha } => GridDensity::from_function_with_tail(
                move |x| if x.abs() >= 1.0 { 0.5 * alpha * x.abs().powf(-1.0 - alpha) } else { 0.0 },
                x_min,
                x_max,
                n_points,
                1.0 + alpha,
            ),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            SourceSpec::Uniform { low, high } => low + (high - low) * open_unit(rng),
            SourceSpec::Normal { mean, sd } => {
                sample_with(&StableParams { alpha: 2.0, beta: 0.0, c: 0.5 * sd * sd, a: mean }, rng)
            }
            SourceSpec::Stable(p) => sample_with(&p, rng),
            SourceSpec::Pareto { alpha } => {
                let sign = if open_unit(rng) < 0.5 { -1.0 } else { 1.0 };
                sign * open_unit(rng).powf(-1.0 / alpha)
            }
        }
    }

    /// Mean tail coefficient `(c0 + c1)/2` of `p(x) ~ c|x|^{-(1+α)}`, for
    /// heavy-tailed laws.
    pub fn tail_coefficient(&self) -> Result<Option<f64>> {
        Ok(match *self {
            SourceSpec::Pareto { alpha } => Some(0.5 * alpha),
            SourceSpec::Stable(p) if !p.is_normal() => {
                let (c0, c1) = StableDensity::new(p)?.tail_constants()?;
                Some(0.5 * (c0 + c1))
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    #[default]
    Zero,
    MeanShift,
}

/// Optional normalizer overrides; by default the scale constant is derived
/// from the source and target.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormalizerSpec {
    pub scale_const: Option<f64>,
    pub centering: Centering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub source: SourceSpec,
    pub target: StableParams,
    pub n_list: Vec<usize>,
    pub split_b: f64,
    pub eps: f64,
    pub t0: f64,
    pub grid: GridSpec,
    pub seed: u64,
    #[serde(default)]
    pub normalizer: NormalizerSpec,
}

impl ExperimentConfig {
    /// Parses and validates; every failure is [`Error::Config`].
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return fail(format!("schema_version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        self.source.validate()?;
        if self.target.validate().is_err() || classify(&self.target) == StableClass::Extremal {
            return fail(format!("target {:?} is not a non-extremal stable law", self.target));
        }
        if self.target.alpha == 1.0 && self.target.beta != 0.0 {
            return fail("targets with alpha = 1 must be symmetric".into());
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return fail("n_list must be non-empty with entries >= 1".into());
        }
        if !(self.split_b > 0.0 && self.split_b < 0.5) {
            return fail(format!("split_b = {} outside (0, 1/2)", self.split_b));
        }
        let alpha = self.target.alpha;
        if !self.target.is_normal() && !(self.eps > 0.0 && self.eps < alpha / (1.0 + alpha)) {
            return fail(format!("eps = {} outside (0, alpha/(1+alpha))", self.eps));
        }
        if !(self.t0 > 0.0) {
            return fail("t0 must be positive".into());
        }
        let g = &self.grid;
        if !(g.x_min < g.x_max) || !g.n_points.is_power_of_two() || g.n_points < 256 || g.n_points > 1 << 16 {
            return fail(format!("grid {g:?} needs x_min < x_max and 2^8 <= n_points <= 2^16 a power of two"));
        }
        if let Some(s) = self.normalizer.scale_const {
            if !(s > 0.0) {
                return fail("normalizer.scale_const must be positive".into());
            }
        }
        Ok(())
    }

    /// `n_list` sorted ascending without duplicates.
    pub fn sorted_n(&self) -> Vec<usize> {
        let mut v = self.n_list.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}
