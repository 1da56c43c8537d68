//! Density evaluation by Fourier inversion.
//!
//! Pointwise values use the trapezoidal rule on the inversion integral.
//! With node spacing `h` the full-line trapezoid equals the periodized
//! density `Σ_k ψ(x + 2πk/h)` exactly (Poisson summation), so the only
//! errors are the truncation at `|t| = T` and the images at distance
//! `P = 2π/h`. The images decay like `P^{-(1+alpha)}`, which is removed by
//! Richardson extrapolation over `P, 2P, 4P`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use super::{classify, normal_log_pdf, StableClass, StableParams};
use crate::error::{Error, Result};
use crate::quadrature::PowerTail;
use crate::tolerances::Tolerances;

/// Default absolute tolerance for pointwise density values.
pub const DEFAULT_PDF_TOL: f64 = 1e-13;

/// Agreement required between the quadrature and asymptotic branches.
pub const CROSSOVER_LOG_TOL: f64 = 1e-3;

/// Terms kept in the large-|x| expansion.
const SERIES_TERMS: usize = 16;

/// Relative truncation error of the expansion at its radius.
const SERIES_REL_TOL: f64 = 1e-12;

/// Large-|x| expansion `ψ(a ± d) ~ Σ_k A_k d^{-(kα+1)}`, obtained by
/// integrating the power series of `f` term by term against `e^{∓itd}`.
/// Available unless `α = 1, β ≠ 0` (where `log|t|` enters the phase).
#[derive(Debug, Clone)]
pub(crate) struct TailSeries {
    alpha: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    /// Distance from `a` beyond which the truncation error is below
    /// `SERIES_REL_TOL` relative.
    radius: f64,
}

impl TailSeries {
    fn new(params: &StableParams) -> Option<Self> {
        let alpha = params.alpha;
        if alpha >= 2.0 || (alpha == 1.0 && params.beta != 0.0) || params.beta.abs() >= 1.0 {
            return None;
        }
        let omega = if alpha == 1.0 { 0.0 } else { (PI * alpha / 2.0).tan() };
        let z = Complex64::new(params.c, params.c * params.beta * omega);
        let coeffs = |z: Complex64| -> Vec<f64> {
            (1..=SERIES_TERMS)
                .map(|k| {
                    let s = k as f64 * alpha + 1.0;
                    let rot = Complex64::from_polar(1.0, -PI * s / 2.0);
                    let mag = (ln_gamma(s) - ln_gamma(k as f64 + 1.0)).exp() / PI;
                    ((-z).powu(k as u32) * rot).re * mag
                })
                .collect()
        };
        let bound = |k: usize| {
            let s = k as f64 * alpha + 1.0;
            k as f64 * z.norm().ln() + ln_gamma(s) - ln_gamma(k as f64 + 1.0)
        };
        let k = SERIES_TERMS + 1;
        let log_radius = (bound(k) - bound(1) - SERIES_REL_TOL.ln()) / ((k - 1) as f64 * alpha);
        Some(TailSeries { alpha, left: coeffs(z.conj()), right: coeffs(z), radius: log_radius.exp() })
    }

    pub(crate) fn radius(&self) -> f64 {
        self.radius
    }

    /// Leading coefficients `(c0, c1)`.
    pub(crate) fn leading(&self) -> (f64, f64) {
        (self.left[0], self.right[0])
    }

    /// `log ψ(a + d)` for signed `d` with `|d| >= radius`.
    fn log_pdf(&self, d: f64) -> f64 {
        let coeffs = if d < 0.0 { &self.left } else { &self.right };
        let u = d.abs().powf(-self.alpha);
        // Σ A_k u^{k-1}, Horner
        let sum = coeffs.iter().rev().fold(0.0, |acc, a| acc * u + a);
        sum.ln() - (1.0 + self.alpha) * d.abs().ln()
    }
}

fn richardson(coarse: f64, fine: f64, order: f64) -> f64 {
    let r = 2f64.powf(order);
    fine + (fine - coarse) / (r - 1.0)
}

/// Smallest `T` with `(1/π) ∫_T^∞ e^{-c t^α} dt <= eps`.
pub(crate) fn truncation_point(params: &StableParams, eps: f64) -> f64 {
    let alpha = params.alpha;
    let shape = 1.0 / alpha;
    let q = eps * PI * alpha * params.c.powf(shape) / gamma(shape);
    if q >= 1.0 {
        return params.scale();
    }
    let tail = |u: f64| gamma_ur(shape, u);
    let mut hi = 1.0;
    while tail(hi) > q && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (hi / params.c).powf(shape).max(params.scale())
}

/// Trapezoid `(h/π)[g(0)/2 + Σ_{j≥1} g(jh)]` with `g(t) = Re e^{-itx} f(t)`,
/// accumulated with Neumaier compensation.
fn trapezoid(params: &StableParams, x: f64, h: f64, nodes: usize) -> f64 {
    let mut sum = 0.5;
    let mut comp = 0.0;
    for j in 1..=nodes {
        let t = j as f64 * h;
        let (log_mod, phase) = params.log_modulus_and_phase(t);
        let term = log_mod.exp() * (phase - t * x).cos();
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
    }
    (sum + comp) * h / PI
}

fn pdf_with_budget(params: &StableParams, x: f64, tol: f64, budget: usize) -> Result<f64> {
    params.validate()?;
    if tol <= 0.0 {
        return Err(Error::invalid("pdf tolerance must be positive"));
    }
    let t_max = truncation_point(params, tol / 2.0);
    let order = 1.0 + params.alpha;
    let mut period = 32.0 * ((x - params.a).abs() + 4.0 * params.scale() + 1.0);
    let eval = |p: f64| -> Result<f64> {
        let h = 2.0 * PI / p;
        let nodes = (t_max / h).ceil() as usize;
        if nodes > budget {
            return Err(Error::QuadratureBudget {
                nodes,
                context: format!("stable pdf at x = {x} for {params:?}"),
            });
        }
        Ok(trapezoid(params, x, h, nodes))
    };
    let mut v1 = eval(period)?;
    let mut v2 = eval(2.0 * period)?;
    loop {
        let v3 = eval(4.0 * period)?;
        let e1 = richardson(v1, v2, order);
        let e2 = richardson(v2, v3, order);
        if (e2 - e1).abs() <= tol / 2.0 {
            return Ok(e2);
        }
        v1 = v2;
        v2 = v3;
        period *= 2.0;
    }
}

/// Density `ψ(x)` by trapezoidal inversion of the characteristic function,
/// accurate to `tol` in absolute terms.
///
/// `alpha = 1, beta != 0` works but is slow: the `log|t|` phase forces a
/// fine node spacing. Fails with [`Error::QuadratureBudget`] if the node
/// budget of [`Tolerances::max_inversion_nodes`] is exhausted.
pub fn pdf(params: &StableParams, x: f64, tol: f64) -> Result<f64> {
    pdf_with_budget(params, x, tol, Tolerances::default().max_inversion_nodes)
}

/// One FFT inversion with period `m·dx`; returns the first `n` nodes.
fn invert_on_period(params: &StableParams, x0: f64, dx: f64, n: usize, m: usize) -> Vec<f64> {
    let period = m as f64 * dx;
    let dt = 2.0 * PI / period;
    let mut buf: Vec<Complex64> = (0..m)
        .map(|j| {
            let k = if j < m / 2 { j as i64 } else { j as i64 - m as i64 };
            let t = k as f64 * dt;
            let (log_mod, phase) = if t >= 0.0 {
                params.log_modulus_and_phase(t)
            } else {
                let (lm, ph) = params.log_modulus_and_phase(-t);
                (lm, -ph)
            };
            Complex64::from_polar(log_mod.exp(), phase - t * x0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf.iter().take(n).map(|z| z.re / period).collect()
}

/// Density on the grid `x0 + j·dx`, `j < n`, via FFT inversion.
///
/// The FFT period is oversampled (at least 8×) and the periodization error
/// removed by Richardson extrapolation; the period doubles until two
/// consecutive extrapolants agree to `tol`.
pub fn pdf_grid(params: &StableParams, x0: f64, dx: f64, n: usize, tol: f64) -> Result<Vec<f64>> {
    params.validate()?;
    if !(dx > 0.0) || n == 0 {
        return Err(Error::invalid("grid needs dx > 0 and n >= 1"));
    }
    let band = PI / dx;
    if truncation_point(params, tol / 2.0) > band {
        return Err(Error::BandLimit { t: truncation_point(params, tol / 2.0), limit: band });
    }
    let max_len = Tolerances::default().max_fft_len;
    let order = 1.0 + params.alpha;
    let mut m = (8 * n).next_power_of_two();
    let mut v1 = invert_on_period(params, x0, dx, n, m);
    let mut v2 = invert_on_period(params, x0, dx, n, 2 * m);
    loop {
        if 4 * m > max_len {
            return Err(Error::InsufficientPadding(format!(
                "stable grid inversion needs an FFT longer than {max_len}"
            )));
        }
        let v3 = invert_on_period(params, x0, dx, n, 4 * m);
        let mut worst: f64 = 0.0;
        let out: Vec<f64> = (0..n)
            .map(|j| {
                let e1 = richardson(v1[j], v2[j], order);
                let e2 = richardson(v2[j], v3[j], order);
                worst = worst.max((e2 - e1).abs());
                e2
            })
            .collect();
        if worst <= tol {
            return Ok(out);
        }
        v1 = v2;
        v2 = v3;
        m *= 2;
    }
}

/// A stable density with lazily computed tail constants and branch
/// crossover, for repeated evaluation.
#[derive(Debug)]
pub struct StableDensity {
    params: StableParams,
    tol: f64,
    series: Option<TailSeries>,
    tails: OnceLock<Result<(f64, f64)>>,
    crossover: OnceLock<Result<(f64, f64)>>,
}

impl Clone for StableDensity {
    fn clone(&self) -> Self {
        let s = StableDensity {
            params: self.params,
            tol: self.tol,
            series: self.series.clone(),
            tails: OnceLock::new(),
            crossover: OnceLock::new(),
        };
        if let Some(t) = self.tails.get() {
            let _ = s.tails.set(t.clone());
        }
        if let Some(c) = self.crossover.get() {
            let _ = s.crossover.set(c.clone());
        }
        s
    }
}

impl StableDensity {
    pub fn new(params: StableParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::with_tolerance(params, DEFAULT_PDF_TOL))
    }

    fn with_tolerance(params: StableParams, tol: f64) -> Self {
        let series = TailSeries::new(&params);
        StableDensity { params, tol, series, tails: OnceLock::new(), crossover: OnceLock::new() }
    }

    /// Distance from `a` beyond which [`log_pdf`](Self::log_pdf) uses the
    /// multi-term tail expansion; `None` for `α = 1, β ≠ 0` and the normal
    /// law.
    pub fn series_radius(&self) -> Option<f64> {
        self.series.as_ref().map(TailSeries::radius)
    }

    /// Leading tail coefficients from the expansion, `(c0, c1)`.
    pub fn series_tail_constants(&self) -> Option<(f64, f64)> {
        self.series.as_ref().map(TailSeries::leading)
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        pdf(&self.params, x, self.tol)
    }

    /// Limits of `ψ(x)|x|^{1+α}` as `x → -∞` and `x → +∞`.
    pub fn tail_constants(&self) -> Result<(f64, f64)> {
        self.tails.get_or_init(|| extrapolate_tail_constants(&self.params)).clone()
    }

    /// Power-law tail model with exponent `1 + α`.
    pub fn tail_model(&self) -> Result<PowerTail> {
        let (c0, c1) = self.tail_constants()?;
        Ok(PowerTail { exponent: 1.0 + self.params.alpha, left: c0, right: c1 })
    }

    /// Distances from `a` beyond which `log_pdf` uses the asymptotic branch,
    /// `(left, right)`.
    pub fn crossover(&self) -> Result<(f64, f64)> {
        self.crossover.get_or_init(|| self.find_crossover()).clone()
    }

    /// `log c_{0/1} - (1+α) log|x - a|`.
    pub fn asymptotic_log_pdf(&self, x: f64) -> Result<f64> {
        let (c0, c1) = self.tail_constants()?;
        let d = x - self.params.a;
        let c = if d < 0.0 { c0 } else { c1 };
        Ok(c.ln() - (1.0 + self.params.alpha) * d.abs().ln())
    }

    /// `log ψ(x)`: inversion quadrature near `a`, the tail expansion beyond
    /// its radius. For `α = 1, β ≠ 0` the far branch is the leading power
    /// law beyond [`crossover`](Self::crossover).
    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        match classify(&self.params) {
            StableClass::Extremal => Err(Error::ExtremalUnsupported("log_pdf")),
            StableClass::Normal => Ok(normal_log_pdf(&self.params, x)),
            StableClass::NonExtremal => {
                let d = x - self.params.a;
                if let Some(series) = &self.series {
                    return if d.abs() >= series.radius {
                        Ok(series.log_pdf(d))
                    } else {
                        Ok(self.pdf(x)?.max(f64::MIN_POSITIVE).ln())
                    };
                }
                let (left, right) = self.crossover()?;
                if (d < 0.0 && -d >= left) || (d >= 0.0 && d >= right) {
                    self.asymptotic_log_pdf(x)
                } else {
                    Ok(self.pdf(x)?.max(f64::MIN_POSITIVE).ln())
                }
            }
        }
    }

    fn find_crossover(&self) -> Result<(f64, f64)> {
        if classify(&self.params) != StableClass::NonExtremal {
            return Err(Error::ExtremalUnsupported("tail crossover"));
        }
        let scale = self.params.scale();
        let mut out = [0.0; 2];
        for (slot, side) in [-1.0f64, 1.0].iter().enumerate() {
            let mut d = scale;
            let found = loop {
                if d > 1e7 * scale {
                    break None;
                }
                let x = self.params.a + side * d;
                let asym = self.asymptotic_log_pdf(x)?;
                let quad = pdf(&self.params, x, 1e-6 * asym.exp())?;
                if quad > 0.0 && (quad.ln() - asym).abs() < CROSSOVER_LOG_TOL {
                    break Some(d);
                }
                d *= 1.15;
            };
            out[slot] = found.ok_or_else(|| {
                Error::TailExtrapolation("no crossover between quadrature and asymptotic branches".into())
            })?;
        }
        Ok((out[0], out[1]))
    }
}

fn extrapolate_tail_constants(params: &StableParams) -> Result<(f64, f64)> {
    if classify(params) != StableClass::NonExtremal {
        return Err(Error::ExtremalUnsupported("tail_constants (requires alpha < 2, |beta| < 1)"));
    }
    const POINTS: usize = 8;
    const LEVELS: usize = 3;
    let alpha = params.alpha;
    let scale = params.scale();
    let mut out = [0.0; 2];
    for (slot, side) in [-1.0f64, 1.0].iter().enumerate() {
        let mut table: Vec<Vec<f64>> = vec![Vec::with_capacity(POINTS)];
        let mut guess = 1.0 / PI;
        for k in 0..POINTS {
            let d = 10.0 * scale * 2f64.powi(k as i32);
            let weight = d.powf(1.0 + alpha);
            let v = pdf(params, params.a + side * d, 1e-7 * guess / weight)?;
            guess = (v * weight).abs().max(1e-6);
            table[0].push(v * weight);
        }
        for level in 1..=LEVELS {
            let r = 2f64.powf(level as f64 * alpha);
            let prev = &table[level - 1];
            let next: Vec<f64> = prev.windows(2).map(|w| (r * w[1] - w[0]) / (r - 1.0)).collect();
            table.push(next);
        }
        let last = &table[LEVELS];
        let (a, b) = (last[last.len() - 2], last[last.len() - 1]);
        if !(b > 0.0) || (a - b).abs() > 1e-3 * b.abs() {
            return Err(Error::TailExtrapolation(format!(
                "tail constant estimates {a} and {b} disagree beyond 3 significant digits"
            )));
        }
        out[slot] = b;
    }
    Ok((out[0], out[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable_law::cf;

    fn cauchy_pdf(x: f64) -> f64 {
        1.0 / (PI * (1.0 + x * x))
    }

    #[test]
    fn golden_values_at_origin() {
        let v = pdf(&StableParams::cauchy(), 0.0, 1e-10).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-10);
        let v = pdf(&StableParams::standard_normal(), 0.0, 1e-10).unwrap();
        assert!((v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_on_ranges() {
        let cauchy = StableParams::cauchy();
        for i in 0..=40 {
            let x = -50.0 + 2.5 * i as f64;
            let v = pdf(&cauchy, x, 1e-9).unwrap();
            assert!((v - cauchy_pdf(x)).abs() < 1e-8, "x={x} {v}");
        }
        let normal = StableParams::standard_normal();
        for i in 0..=40 {
            let x = -10.0 + 0.5 * i as f64;
            let v = pdf(&normal, x, 1e-9).unwrap();
            let exact = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
            assert!((v - exact).abs() < 1e-8, "x={x}");
        }
    }

    /// Independent oracle: composite Gauss–Legendre on the half-line
    /// inversion integral, far from the trapezoid/Poisson route.
    fn gauss_inversion(params: &StableParams, x: f64, panels: usize) -> f64 {
        let t_max = 60f64.powf(1.0 / params.alpha) / params.scale();
        let h = t_max / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            acc += crate::quadrature::gl_panel(p as f64 * h, (p + 1) as f64 * h, |t| {
                (cf(params, t) * Complex64::from_polar(1.0, -t * x)).re
            });
        }
        acc / PI
    }

    #[test]
    fn symmetric_one_point_five_matches_gauss_oracle() {
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let coarse = gauss_inversion(&p, 0.0, 400);
        let fine = gauss_inversion(&p, 0.0, 4000);
        assert!((coarse - fine).abs() < 1e-8);
        let v = pdf(&p, 0.0, 1e-10).unwrap();
        assert!((v - fine).abs() < 1e-8, "{v} vs {fine}");
        // closed form at the origin: Γ(1 + 1/α) / (π c^{1/α})
        assert!((v - gamma(1.0 + 1.0 / 1.5) / PI).abs() < 1e-9);
    }

    #[test]
    fn symmetry_in_x() {
        let p = StableParams::symmetric(1.2, 0.7).unwrap();
        for &x in &[0.3, 1.7, 6.0, 25.0] {
            let l = pdf(&p, -x, 1e-12).unwrap();
            let r = pdf(&p, x, 1e-12).unwrap();
            assert!((l - r).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_inversion_matches_pointwise() {
        let p = StableParams::new(1.5, 0.3, 1.0, 0.2).unwrap();
        let (x0, dx, n) = (-20.0, 40.0 / 1024.0, 1024);
        let g = pdf_grid(&p, x0, dx, n, 1e-10).unwrap();
        for j in (0..n).step_by(97) {
            let x = x0 + j as f64 * dx;
            let v = pdf(&p, x, 1e-12).unwrap();
            assert!((g[j] - v).abs() < 1e-9, "x={x} grid={} point={v}", g[j]);
        }
    }

    #[test]
    fn cauchy_grid_inversion() {
        let (x0, dx, n) = (-50.0, 100.0 / 4096.0, 4096);
        let g = pdf_grid(&StableParams::cauchy(), x0, dx, n, 1e-10).unwrap();
        let worst = (0..n)
            .map(|j| (g[j] - cauchy_pdf(x0 + j as f64 * dx)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn mass_with_extrapolated_tails() {
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let (x0, dx, n) = (-100.0, 200.0 / 8192.0, 8193);
        let g = pdf_grid(&p, x0, dx, n, 1e-11).unwrap();
        let mut mass: f64 = g.iter().sum::<f64>() * dx - 0.5 * dx * (g[0] + g[n - 1]);
        let dens = StableDensity::new(p).unwrap();
        let tail = dens.tail_model().unwrap();
        mass += tail.left_mass(-100.0) + tail.right_mass(100.0);
        assert!((mass - 1.0).abs() < 1e-4, "{mass}");
        assert!(g.iter().all(|v| *v >= -1e-11));
    }

    #[test]
    fn cauchy_tail_constants() {
        let d = StableDensity::new(StableParams::cauchy()).unwrap();
        let (c0, c1) = d.tail_constants().unwrap();
        assert!((c0 - 1.0 / PI).abs() < 1e-5 && (c1 - 1.0 / PI).abs() < 1e-5);
    }

    /// Oracle: the convergent/asymptotic series of symmetric stable laws gives
    /// c = c_scale Γ(1+α) sin(πα/2) / π for the leading tail coefficient.
    #[test]
    fn symmetric_tail_constants_match_series() {
        let d = StableDensity::new(StableParams::symmetric(1.5, 1.0).unwrap()).unwrap();
        let (c0, c1) = d.tail_constants().unwrap();
        let series = gamma(2.5) * (0.75 * PI).sin() / PI;
        assert!((c0 - c1).abs() < 1e-6);
        assert!((c1 - series).abs() < 1e-4 * series, "{c1} vs {series}");
    }

    /// With this sign convention, beta > 0 at alpha = 1.5 pushes mass left:
    /// c0/c1 = (1 + beta)/(1 - beta) = 3 by the standard-form tail law.
    #[test]
    fn skewed_tail_constants() {
        let d = StableDensity::new(StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap()).unwrap();
        let (c0, c1) = d.tail_constants().unwrap();
        assert!(c0 > c1 && c1 > 0.0);
        assert!((c0 / c1 - 3.0).abs() < 0.01, "{}", c0 / c1);
        let sym = gamma(2.5) * (0.75 * PI).sin() / PI;
        assert!(((c0 + c1) / 2.0 - sym).abs() < 1e-3 * sym);
    }

    #[test]
    fn log_pdf_branches() {
        let cauchy = StableDensity::new(StableParams::cauchy()).unwrap();
        assert!((cauchy.log_pdf(0.0).unwrap() + PI.ln()).abs() < 1e-10);
        let far = cauchy.log_pdf(1e6).unwrap();
        assert!((far - ((1.0 / PI).ln() - 2.0 * 1e6f64.ln())).abs() < 1e-6);

        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let d = StableDensity::new(p).unwrap();
        let (c0, c1) = d.tail_constants().unwrap();
        let asym = c1.ln() - 2.5 * 50f64.ln();
        let quad = pdf(&p, 50.0, 1e-14).unwrap();
        assert!((asym.exp() / quad - 1.0).abs() < 0.02);
        let (left, right) = d.crossover().unwrap();
        for x in [-left, right] {
            let q = pdf(&p, x, 1e-15).unwrap().ln();
            let a = d.asymptotic_log_pdf(x).unwrap();
            assert!((q - a).abs() < CROSSOVER_LOG_TOL);
        }
        assert!((c0 - c1).abs() < 1e-6);
    }

    #[test]
    fn tail_series_matches_quadrature_at_radius() {
        for (alpha, beta, c) in [(0.8, 0.3, 1.0), (1.0, 0.0, 2.0), (1.2, 0.0, 1.0), (1.5, 0.5, 1.0), (1.9, -0.2, 0.7)] {
            let p = StableParams::new(alpha, beta, c, 0.3).unwrap();
            let d = StableDensity::new(p).unwrap();
            let r = d.series_radius().unwrap();
            for x in [0.3 - r, 0.3 + r, 0.3 + 1.5 * r] {
                let series = d.log_pdf(x).unwrap();
                let quad = pdf(&p, x, 1e-9 * series.exp()).unwrap().ln();
                assert!((series - quad).abs() < 1e-7, "{p:?} x={x} {series} {quad}");
            }
        }
    }

    #[test]
    fn tail_series_leading_terms() {
        let d = StableDensity::new(StableParams::cauchy()).unwrap();
        let (c0, c1) = d.series_tail_constants().unwrap();
        assert!((c0 - 1.0 / PI).abs() < 1e-15 && (c1 - 1.0 / PI).abs() < 1e-15);
        // Cauchy: 1/(π(1+x²)) = Σ (-1)^j x^{-2j-2}/π
        let exact = -(PI * (1.0 + 400.0f64)).ln();
        assert!((d.log_pdf(20.0).unwrap() - exact).abs() < 1e-13);

        let d = StableDensity::new(StableParams::new(1.5, 0.5, 1.0, 0.0).unwrap()).unwrap();
        let (s0, s1) = d.series_tail_constants().unwrap();
        let (c0, c1) = d.tail_constants().unwrap();
        assert!((s0 / s1 - 3.0).abs() < 1e-12);
        assert!((c0 - s0).abs() < 1e-4 * s0 && (c1 - s1).abs() < 1e-4 * s1);
        assert!(StableDensity::new(StableParams::new(1.0, 0.5, 1.0, 0.0).unwrap()).unwrap().series_radius().is_none());
    }

    #[test]
    fn log_pdf_rejects_extremal() {
        let d = StableDensity::new(StableParams::new(0.5, 1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!(matches!(d.log_pdf(1.0), Err(Error::ExtremalUnsupported(_))));
    }

    #[test]
    fn alpha_one_skewed_slow_path_is_a_density() {
        let p = StableParams::new(1.0, 0.5, 1.0, 0.0).unwrap();
        let v: Vec<f64> = (-4..=4).map(|k| pdf(&p, k as f64, 1e-8).unwrap()).collect();
        assert!(v.iter().all(|x| *x > 0.0));
    }
}
