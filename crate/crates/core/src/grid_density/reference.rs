//! Log-densities used as the second argument of relative entropies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stable_law::{classify, pdf_grid, truncation_point, StableClass, StableDensity, StableParams};

const TABLE_TOL: f64 = 1e-14;

/// How `-log ψ(x)` grows as `|x| → ∞`; decides which tail integrals
/// converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailGrowth {
    /// `-log ψ ~ γ log|x|` (power tails).
    Logarithmic,
    /// `-log ψ ~ x²` (Gaussian).
    Quadratic,
}

pub trait LogReference: Sync {
    fn ln_pdf(&self, x: f64) -> f64;
    fn growth(&self) -> TailGrowth;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianReference {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianReference {
    pub fn standard() -> Self {
        GaussianReference { mean: 0.0, variance: 1.0 }
    }
}

impl LogReference for GaussianReference {
    fn ln_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * d * d / self.variance - 0.5 * (2.0 * PI * self.variance).ln()
    }

    fn growth(&self) -> TailGrowth {
        TailGrowth::Quadratic
    }
}

/// A closure with a declared growth class.
pub struct FnReference<F> {
    f: F,
    growth: TailGrowth,
}

impl<F: Fn(f64) -> f64 + Sync> FnReference<F> {
    pub fn new(f: F, growth: TailGrowth) -> Self {
        FnReference { f, growth }
    }
}

impl<F: Fn(f64) -> f64 + Sync> LogReference for FnReference<F> {
    fn ln_pdf(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn growth(&self) -> TailGrowth {
        self.growth
    }
}

/// Stable log-density tabulated on a window and interpolated by cubic
/// Lagrange polynomials; outside the window it falls back to
/// [`StableDensity::log_pdf`].
#[derive(Debug, Clone)]
pub struct StableGridReference {
    density: StableDensity,
    x0: f64,
    dx: f64,
    log_values: Vec<f64>,
}

impl StableGridReference {
    /// Tabulates `log ψ` where the density is evaluated by inversion: the
    /// part of `[x_min, x_max]` inside the tail-expansion radius (the whole
    /// range for `α = 1, β ≠ 0`). The spacing is `scale/32`, or finer where
    /// the inversion band requires it, independent of `dx`; the normal law
    /// needs no table.
    pub fn new(params: StableParams, x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if classify(&params) == StableClass::Extremal {
            return Err(Error::ExtremalUnsupported("stable reference"));
        }
        if !(x_min < x_max && dx > 0.0) {
            return Err(Error::invalid("stable reference needs x_min < x_max and dx > 0"));
        }
        let density = StableDensity::new(params)?;
        let empty = StableGridReference { density: density.clone(), x0: x_min, dx, log_values: Vec::new() };
        if params.is_normal() {
            return Ok(empty);
        }
        let dx = (PI / (1.25 * truncation_point(&params, TABLE_TOL / 2.0))).min(params.scale() / 32.0);
        let (lo, hi) = match density.series_radius() {
            Some(r) => (x_min.max(params.a - r - 4.0 * dx), x_max.min(params.a + r + 4.0 * dx)),
            None => {
                // warm the crossover cache before any parallel use
                density.crossover()?;
                (x_min, x_max)
            }
        };
        if hi - lo < 4.0 * dx {
            return Ok(empty);
        }
        let n = ((hi - lo) / dx).ceil() as usize + 7;
        let x0 = lo - 3.0 * dx;
        let log_values =
            pdf_grid(&params, x0, dx, n, TABLE_TOL)?.into_iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
        Ok(StableGridReference { density, x0, dx, log_values })
    }

    pub fn params(&self) -> &StableParams {
        self.density.params()
    }

    pub fn density(&self) -> &StableDensity {
        &self.density
    }

    /// Tabulated window where interpolation is used, if any.
    pub fn window(&self) -> Option<(f64, f64)> {
        (self.log_values.len() >= 4)
            .then(|| (self.x0 + self.dx, self.x0 + (self.log_values.len() - 2) as f64 * self.dx))
    }
}

impl LogReference for StableGridReference {
    fn ln_pdf(&self, x: f64) -> f64 {
        let inside = self.window().is_some_and(|(lo, hi)| (lo..=hi).contains(&x));
        if !inside {
            return self.density.log_pdf(x).unwrap_or(f64::NEG_INFINITY);
        }
        let u = (x - self.x0) / self.dx;
        let j = (u.floor() as usize).clamp(1, self.log_values.len() - 3);
        let s = u - j as f64;
        let y = &self.log_values[j - 1..j + 3];
        // cubic through nodes at -1, 0, 1, 2
        -s * (s - 1.0) * (s - 2.0) / 6.0 * y[0] + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * y[1]
            - (s + 1.0) * s * (s - 2.0) / 2.0 * y[2]
            + (s + 1.0) * s * (s - 1.0) / 6.0 * y[3]
    }

    fn growth(&self) -> TailGrowth {
        if self.density.params().is_normal() {
            TailGrowth::Quadratic
        } else {
            TailGrowth::Logarithmic
        }
    }
}
