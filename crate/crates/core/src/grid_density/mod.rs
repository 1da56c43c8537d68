//! Densities sampled on uniform grids.
//!
//! A [`GridDensity`] stores node values `p(x0 + j·dx)`, `j < N` with `N` a
//! power of two, and optionally a power-law [`PowerTail`] describing the
//! density beyond both ends of the grid. All integrals use the trapezoidal
//! rule on the grid plus closed-form (or Gauss–Laguerre) integrals over the
//! tails.

mod fourier;
mod io;
mod reference;

pub use fourier::Spectrum;
pub use io::{read_grid, write_grid, GridSidecar};
pub use reference::{FnReference, GaussianReference, LogReference, StableGridReference, TailGrowth};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{legendre4, power_tail_integral, PowerTail};
use crate::stable_law::{pdf_grid, StableDensity, StableParams};
use crate::tolerances::Tolerances;

/// Smallest grid accepted by [`GridDensity::from_function`].
pub const MIN_POINTS: usize = 1 << 8;

/// Share of the grid at each end used to fit a tail coefficient.
pub const TAIL_FIT_FRACTION: f64 = 0.1;

/// Absolute accuracy of [`GridDensity::from_stable`] node values.
pub const STABLE_GRID_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
    tail: Option<PowerTail>,
    renormalization: f64,
}

/// Distances between two densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    L1,
    /// `∫ |x|^s |p - q|`.
    WeightedL1(f64),
    Sup,
}

fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// `∫_W^∞ c x^{-γ}(-log c + γ log x) dx`.
fn tail_entropy(c: f64, w: f64, g: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    c * w.powf(1.0 - g) / (g - 1.0) * (-c.ln() + g * w.ln() + g / (g - 1.0))
}

/// Cell average of `f` over `[a, b]`, bisecting where the 4-point rule
/// disagrees with its two halves (jump discontinuities).
fn cell_average<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    fn gl4<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let rule = legendre4();
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gl4(f, a, m), gl4(f, m, b));
        if depth == 0 || ((l + r) - whole).abs() <= 1e-13 * (1.0 + whole.abs()) * (b - a) {
            return l + r;
        }
        rec(f, a, m, l, depth - 1) + rec(f, m, b, r, depth - 1)
    }
    rec(f, a, b, gl4(f, a, b), 24) / (b - a)
}

impl GridDensity {
    /// Wraps node values, clipping round-off negatives and renormalizing
    /// (tail mass included) to unit mass.
    pub fn from_values(x0: f64, dx: f64, mut values: Vec<f64>, tail: Option<PowerTail>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("grid length {n} is not a power of two >= 2")));
        }
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::invalid("grid needs finite x0 and dx > 0"));
        }
        if let Some(t) = &tail {
            let last = x0 + (n - 1) as f64 * dx;
            if !(t.exponent > 1.0) {
                return Err(Error::invalid(format!("tail exponent {} must exceed 1", t.exponent)));
            }
            if !(x0 < 0.0 && last > 0.0) {
                return Err(Error::invalid("a tail model needs a grid straddling the origin"));
            }
        }
        let peak = values.iter().cloned().fold(0.0, f64::max);
        let clip = Tolerances::default().negative_clip;
        for (j, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NegativeSample { x: x0 + j as f64 * dx, value: *v });
            }
            if *v < 0.0 {
                if *v < -clip * peak.max(f64::MIN_POSITIVE) {
                    return Err(Error::NegativeSample { x: x0 + j as f64 * dx, value: *v });
                }
                *v = 0.0;
            }
        }
        let mut g = GridDensity { x0, dx, values, tail, renormalization: 1.0 };
        let mass = g.mass();
        if !(mass > 0.0) {
            return Err(Error::Truncation { mass });
        }
        g.scale_by(1.0 / mass);
        g.renormalization = 1.0 / mass;
        Ok(g)
    }

    /// Cell averages of `f` on `n_points` nodes spanning `[x_min, x_max]`,
    /// renormalized to unit mass. Fails with [`Error::Truncation`] when the
    /// grid captures less than 99% of the mass.
    pub fn from_function<F: Fn(f64) -> f64>(f: F, x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let (x0, dx, values) = sample_cells(&f, x_min, x_max, n_points)?;
        let raw = GridDensity { x0, dx, values, tail: None, renormalization: 1.0 };
        let mass = raw.mass();
        if mass < Tolerances::default().min_captured_mass {
            return Err(Error::Truncation { mass });
        }
        Self::from_values(x0, dx, raw.values, None)
    }

    /// Like [`from_function`](Self::from_function) for densities with power
    /// tails: a tail `c |x|^{-exponent}` is fitted on the outer 10% of each
    /// side and its mass counts towards the captured mass.
    pub fn from_function_with_tail<F: Fn(f64) -> f64>(
        f: F,
        x_min: f64,
        x_max: f64,
        n_points: usize,
        exponent: f64,
    ) -> Result<Self> {
        let (x0, dx, values) = sample_cells(&f, x_min, x_max, n_points)?;
        let mut raw = GridDensity { x0, dx, values, tail: None, renormalization: 1.0 };
        raw.tail = Some(raw.fit_tail(exponent)?);
        let mass = raw.mass();
        if mass < Tolerances::default().min_captured_mass {
            return Err(Error::Truncation { mass });
        }
        Self::from_values(x0, dx, raw.values, raw.tail)
    }

    /// Stable density at the nodes of `[x_min, x_max]` by FFT inversion,
    /// with the power-law tail model for `α < 2`.
    pub fn from_stable(params: &StableParams, x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < MIN_POINTS || !(x_min < x_max) {
            return Err(Error::invalid(format!("bad stable grid [{x_min}, {x_max}] with {n_points} points")));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        let values = pdf_grid(params, x_min, dx, n_points, STABLE_GRID_TOL)?;
        let tail = if params.is_normal() { None } else { Some(StableDensity::new(*params)?.tail_model()?) };
        let raw = GridDensity { x0: x_min, dx, values, tail, renormalization: 1.0 };
        let mass = raw.mass();
        if mass < Tolerances::default().min_captured_mass {
            return Err(Error::Truncation { mass });
        }
        Self::from_values(x_min, dx, raw.values, tail)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> Option<&PowerTail> {
        self.tail.as_ref()
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail.map(|t| t.exponent)
    }

    /// Factor applied to the raw samples to reach unit mass.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(j, v)| (self.x(j), *v))
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    fn scale_by(&mut self, k: f64) {
        for v in &mut self.values {
            *v *= k;
        }
        self.tail = self.tail.map(|t| t.scaled(k));
    }

    /// The same grid without the tail model (not renormalized).
    pub fn without_tail(&self) -> GridDensity {
        GridDensity { tail: None, ..self.clone() }
    }

    /// Replaces the tail model and renormalizes.
    pub fn with_tail(&self, tail: Option<PowerTail>) -> Result<GridDensity> {
        Self::from_values(self.x0, self.dx, self.values.clone(), tail)
    }

    /// `Σ w_j g(x_j, p_j) dx` with trapezoid weights.
    pub fn trapezoid<G: Fn(f64, f64) -> f64>(&self, g: G) -> f64 {
        let n = self.len();
        self.nodes().enumerate().map(|(j, (x, v))| trapezoid_weight(j, n) * g(x, v)).sum::<f64>() * self.dx
    }

    /// Mass beyond the left and right ends according to the tail model.
    pub fn tail_masses(&self) -> (f64, f64) {
        match &self.tail {
            Some(t) => (t.left_mass(self.x0), t.right_mass(self.x_max())),
            None => (0.0, 0.0),
        }
    }

    pub fn mass(&self) -> f64 {
        let (l, r) = self.tail_masses();
        self.trapezoid(|_, v| v) + l + r
    }

    /// Least-squares fit of `c` in `c |x|^{-exponent}` on the outer 10% of
    /// each side.
    pub fn fit_tail(&self, exponent: f64) -> Result<PowerTail> {
        if !(exponent > 1.0) {
            return Err(Error::invalid(format!("tail exponent {exponent} must exceed 1")));
        }
        let n = self.len();
        let k = ((n as f64 * TAIL_FIT_FRACTION) as usize).max(2);
        let fit = |range: std::ops::Range<usize>| -> Result<f64> {
            let logs: Vec<f64> = range
                .filter_map(|j| {
                    let (x, v) = (self.x(j), self.values[j]);
                    (v > 0.0 && x != 0.0).then(|| v.ln() + exponent * x.abs().ln())
                })
                .collect();
            if logs.is_empty() {
                return Err(Error::TailExtrapolation("no positive values in the outer tail region".into()));
            }
            Ok((logs.iter().sum::<f64>() / logs.len() as f64).exp())
        };
        if !(self.x0 < 0.0 && self.x_max() > 0.0) {
            return Err(Error::TailExtrapolation("tail fit needs a grid straddling the origin".into()));
        }
        Ok(PowerTail { exponent, left: fit(0..k)?, right: fit(n - k..n)? })
    }

    /// Density of `X/b - a` for `X ~ p`.
    pub fn affine(&self, a: f64, b: f64) -> Result<GridDensity> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("affine scale b = {b} must be positive")));
        }
        Ok(GridDensity {
            x0: self.x0 / b - a,
            dx: self.dx / b,
            values: self.values.iter().map(|v| v * b).collect(),
            tail: self.tail.map(|t| t.affine(b)),
            renormalization: self.renormalization,
        })
    }

    /// Linear interpolation inside the grid; the tail model (or zero) outside.
    pub fn interpolate(&self, x: f64) -> f64 {
        let u = (x - self.x0) / self.dx;
        let n = self.len();
        if u < 0.0 || u > (n - 1) as f64 {
            return self.tail.map_or(0.0, |t| t.density(x));
        }
        let j = (u.floor() as usize).min(n - 2);
        let w = u - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }

    /// Interpolates onto the grid `x0 + j·dx`, `j < n`, keeps the tail model
    /// and renormalizes.
    pub fn project(&self, x0: f64, dx: f64, n: usize) -> Result<GridDensity> {
        let values = (0..n).map(|j| self.interpolate(x0 + j as f64 * dx)).collect();
        Self::from_values(x0, dx, values, self.tail)
    }

    /// `h(p) = -∫ p log p`, with the tail contribution in closed form.
    pub fn entropy(&self) -> f64 {
        let grid = self.trapezoid(|_, v| if v > 0.0 { -v * v.ln() } else { 0.0 });
        grid + match &self.tail {
            Some(t) => {
                tail_entropy(t.left, -self.x0, t.exponent) + tail_entropy(t.right, self.x_max(), t.exponent)
            }
            None => 0.0,
        }
    }

    /// Tail part of `∫ p g` where `g` grows at most like `reference`;
    /// `+∞` when the integral diverges.
    pub(crate) fn tail_integral<G: Fn(f64, f64) -> f64>(&self, growth: TailGrowth, g: G) -> f64 {
        let Some(t) = self.tail else { return 0.0 };
        let decay = match growth {
            TailGrowth::Logarithmic => t.exponent,
            TailGrowth::Quadratic => t.exponent - 2.0,
        };
        if decay <= 1.0 {
            return f64::INFINITY;
        }
        let right = power_tail_integral(self.x_max(), decay, |x| g(x, t.density(x)));
        let left = power_tail_integral(-self.x0, decay, |x| g(-x, t.density(-x)));
        left + right
    }

    /// `D(p‖ψ) = ∫ p log(p/ψ)`; `+∞` when the tail contribution diverges.
    pub fn relative_entropy(&self, reference: &dyn LogReference) -> f64 {
        let grid = self.trapezoid(|x, v| if v > 0.0 { v * (v.ln() - reference.ln_pdf(x)) } else { 0.0 });
        let tail = self.tail_integral(reference.growth(), |x, v| {
            if v > 0.0 {
                v * (v.ln() - reference.ln_pdf(x))
            } else {
                0.0
            }
        });
        grid + tail
    }

    /// `∫ p log(1/ψ)`; `+∞` when divergent.
    pub fn cross_entropy(&self, reference: &dyn LogReference) -> f64 {
        let grid = self.trapezoid(|x, v| -v * reference.ln_pdf(x));
        grid + self.tail_integral(reference.growth(), |x, v| -v * reference.ln_pdf(x))
    }

    /// `E|X|^s`.
    pub fn abs_moment(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::invalid(format!("moment order {s} must be positive")));
        }
        let grid = self.trapezoid(|x, v| x.abs().powf(s) * v);
        let tail = match &self.tail {
            None => 0.0,
            Some(t) => {
                if s >= t.exponent - 1.0 {
                    return Err(Error::DivergentMoment { order: s, tail_exponent: t.exponent });
                }
                let k = t.exponent - 1.0 - s;
                (t.left * (-self.x0).powf(-k) + t.right * self.x_max().powf(-k)) / k
            }
        };
        Ok(grid + tail)
    }

    /// `E X`; the tails enter to leading order.
    pub fn mean(&self) -> Result<f64> {
        let grid = self.trapezoid(|x, v| x * v);
        let tail = match &self.tail {
            None => 0.0,
            Some(t) => {
                if t.exponent <= 2.0 {
                    return Err(Error::DivergentMoment { order: 1.0, tail_exponent: t.exponent });
                }
                let k = t.exponent - 2.0;
                (t.right * self.x_max().powf(-k) - t.left * (-self.x0).powf(-k)) / k
            }
        };
        Ok(grid + tail)
    }

    pub fn variance(&self) -> Result<f64> {
        let m = self.mean()?;
        let second = self.abs_moment(2.0)?;
        Ok(second - m * m)
    }
}

fn sample_cells<F: Fn(f64) -> f64>(f: &F, x_min: f64, x_max: f64, n: usize) -> Result<(f64, f64, Vec<f64>)> {
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::invalid(format!("bad range [{x_min}, {x_max}]")));
    }
    if n < MIN_POINTS || !n.is_power_of_two() {
        return Err(Error::invalid(format!("n_points = {n} must be a power of two >= {MIN_POINTS}")));
    }
    let dx = (x_max - x_min) / (n - 1) as f64;
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let x = x_min + j as f64 * dx;
        let v = cell_average(f, x - 0.5 * dx, x + 0.5 * dx);
        if v < 0.0 || v.is_nan() {
            return Err(Error::NegativeSample { x, value: v });
        }
        values.push(v);
    }
    Ok((x_min, dx, values))
}

/// Evaluates `p` and `q` on a common grid: the union of both ranges at the
/// finer spacing, by linear interpolation (tail models outside each grid).
fn common_grid(p: &GridDensity, q: &GridDensity) -> (f64, f64, Vec<(f64, f64)>) {
    let dx = p.dx.min(q.dx);
    let lo = p.x0.min(q.x0);
    let hi = p.x_max().max(q.x_max());
    let n = ((hi - lo) / dx).round() as usize + 1;
    let pairs = (0..n)
        .map(|j| {
            let x = lo + j as f64 * dx;
            (p.interpolate(x), q.interpolate(x))
        })
        .collect();
    (lo, dx, pairs)
}

/// Distance between two densities under `metric`, after resampling both to
/// a common grid. Tail models contribute beyond the common range when both
/// share an exponent.
pub fn distance(p: &GridDensity, q: &GridDensity, metric: Metric) -> f64 {
    let (lo, dx, pairs) = common_grid(p, q);
    let n = pairs.len();
    let hi = lo + (n - 1) as f64 * dx;
    let weight = |x: f64| match metric {
        Metric::WeightedL1(s) => x.abs().powf(s),
        _ => 1.0,
    };
    match metric {
        Metric::Sup => pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        Metric::L1 | Metric::WeightedL1(_) => {
            let grid: f64 = pairs
                .iter()
                .enumerate()
                .map(|(j, (a, b))| trapezoid_weight(j, n) * weight(lo + j as f64 * dx) * (a - b).abs())
                .sum::<f64>()
                * dx;
            let s = if let Metric::WeightedL1(s) = metric { s } else { 0.0 };
            grid + tail_difference(p.tail, q.tail, lo, hi, s)
        }
    }
}

/// `∫_{outside [lo, hi]} |x|^s |T_p - T_q|` for tails of a common exponent.
fn tail_difference(p: Option<PowerTail>, q: Option<PowerTail>, lo: f64, hi: f64, s: f64) -> f64 {
    let zero = |t: &PowerTail| PowerTail { exponent: t.exponent, left: 0.0, right: 0.0 };
    let (tp, tq) = match (p, q) {
        (None, None) => return 0.0,
        (Some(a), None) => (a, zero(&a)),
        (None, Some(b)) => (zero(&b), b),
        (Some(a), Some(b)) => (a, b),
    };
    if (tp.exponent - tq.exponent).abs() > 1e-12 || lo >= 0.0 || hi <= 0.0 {
        return 0.0;
    }
    let k = tp.exponent - 1.0 - s;
    if k <= 0.0 {
        return f64::INFINITY;
    }
    ((tp.left - tq.left).abs() * (-lo).powf(-k) + (tp.right - tq.right).abs() * hi.powf(-k)) / k
}

#[cfg(test)]
mod tests;
