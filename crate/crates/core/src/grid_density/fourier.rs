//! Spectra of periodized grid densities and convolution powers.
//!
//! A density with power tails is first *folded*: the whole-line density
//! (grid values inside, tail model outside) is periodized with period
//! `P = m·dx`. Periodization commutes with convolution, so powers of the
//! folded spectrum give the periodized `p^{*n}` exactly; the images
//! `Σ_{k≠0} p^{*n}(x + kP)` are then removed using the leading-order tail
//! `n·c|x|^{-γ}` of the sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::GridDensity;
use crate::error::{Error, Result};
use crate::quadrature::{oscillatory_power_integral, PowerTail};
use crate::tolerances::Tolerances;

/// Discrete spectrum `bins[k] = Σ_j u_j e^{2πijk/m} dx` of a density sampled
/// on a ring of `m` nodes at `origin + j·dx`.
///
/// `e^{i t_k origin} bins[k]` approximates the characteristic function at
/// `t_k = 2πk/(m dx)` (negative frequencies for `k >= m/2`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    dx: f64,
    origin: f64,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn period(&self) -> f64 {
        self.len() as f64 * self.dx
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    /// Angular frequency of bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        let m = self.len();
        let signed = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
        2.0 * PI * signed / self.period()
    }

    /// Characteristic function value at bin `k`.
    pub fn cf(&self, k: usize) -> Complex64 {
        self.bins[k] * Complex64::from_polar(1.0, self.frequency(k) * self.origin)
    }

    /// Spectrum of the `n`-fold convolution.
    pub fn pow(&self, n: u32) -> Spectrum {
        Spectrum {
            dx: self.dx,
            origin: self.origin * n as f64,
            bins: self.bins.iter().map(|z| z.powi(n as i32)).collect(),
        }
    }

    fn check_compatible(&self, other: &Spectrum) -> Result<()> {
        if self.len() != other.len() || (self.dx - other.dx).abs() > 1e-12 * self.dx {
            return Err(Error::invalid("spectra live on different rings"));
        }
        Ok(())
    }

    /// Spectrum of the convolution of the two densities.
    pub fn mul(&self, other: &Spectrum) -> Result<Spectrum> {
        self.check_compatible(other)?;
        Ok(Spectrum {
            dx: self.dx,
            origin: self.origin + other.origin,
            bins: self.bins.iter().zip(&other.bins).map(|(a, b)| a * b).collect(),
        })
    }

    /// `a·self + b·other`; both rings must share their origin.
    pub fn combine(&self, a: f64, other: &Spectrum, b: f64) -> Result<Spectrum> {
        self.check_compatible(other)?;
        let shift = (self.origin - other.origin) / self.dx;
        if (shift - shift.round()).abs() > 1e-6 {
            return Err(Error::invalid("spectra are not aligned on a common lattice"));
        }
        let other = other.reorigin(self.origin);
        Ok(Spectrum {
            dx: self.dx,
            origin: self.origin,
            bins: self.bins.iter().zip(&other.bins).map(|(x, y)| x * a + y * b).collect(),
        })
    }

    /// The same periodic function described from a different origin on the
    /// same lattice.
    fn reorigin(&self, origin: f64) -> Spectrum {
        let delta = self.origin - origin;
        let bins = (0..self.len())
            .map(|k| self.bins[k] * Complex64::from_polar(1.0, self.frequency(k) * delta))
            .collect();
        Spectrum { dx: self.dx, origin, bins }
    }

    /// `∫_{|t| >= t0} |f(t)| dt` over the resolvable band: trapezoid on
    /// the spectral lattice, with the partial cell at `t0` interpolated.
    /// Uses `|f(-t)| = |f(t)|` (real densities).
    pub fn abs_integral_beyond(&self, t0: f64) -> f64 {
        let m = self.len();
        let dt = 2.0 * PI / self.period();
        let g: Vec<f64> = (0..=m / 2).map(|k| self.bins[k % m].norm()).collect();
        let last = g.len() - 1;
        let pos = t0.max(0.0) / dt;
        if pos >= last as f64 {
            return 0.0;
        }
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        let at_t0 = g[k] * (1.0 - frac) + g[k + 1] * frac;
        let mut acc = 0.5 * (at_t0 + g[k + 1]) * (1.0 - frac);
        for j in k + 1..last {
            acc += 0.5 * (g[j] + g[j + 1]);
        }
        2.0 * acc * dt
    }

    /// Density values on the ring, index `j` at `origin + j·dx` (mod period).
    pub fn ring(&self) -> Vec<f64> {
        let m = self.len();
        let mut buf = self.bins.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let norm = 1.0 / (m as f64 * self.dx);
        buf.iter().map(|z| z.re * norm).collect()
    }

    /// Unfolds to a [`GridDensity`] on one period centred near `center`,
    /// removing the periodization images of `images` (the tail of the
    /// unfolded function) and clipping round-off negatives.
    pub fn to_density(&self, center: f64, images: Option<PowerTail>, tol: &Tolerances) -> Result<GridDensity> {
        let m = self.len();
        let ring = self.ring();
        let period = self.period();
        let shift = ((center - 0.5 * period - self.origin) / self.dx).round() as i64;
        let start = self.origin + shift as f64 * self.dx;
        let r = shift.rem_euclid(m as i64) as usize;
        let mut values: Vec<f64> = (0..m)
            .map(|j| {
                let v = ring[(r + j) % m];
                match &images {
                    Some(t) => v - t.image_sum(start + j as f64 * self.dx, period),
                    None => v,
                }
            })
            .collect();
        let peak = values.iter().cloned().fold(0.0, f64::max);
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -tol.negative_lobe * peak {
                    return Err(Error::NegativeLobe { value: *v / peak });
                }
                *v = 0.0;
            }
        }
        GridDensity::from_values(start, self.dx, values, images)
    }
}

fn fft_len(len: usize, tol: &Tolerances) -> Result<usize> {
    let m = len.next_power_of_two();
    if m > tol.max_fft_len {
        return Err(Error::InsufficientPadding(format!(
            "needs an FFT of length {m}, above the limit {}",
            tol.max_fft_len
        )));
    }
    Ok(m)
}

fn combined_tail(a: Option<PowerTail>, b: Option<PowerTail>) -> Option<PowerTail> {
    match (a, b) {
        (None, t) | (t, None) => t,
        (Some(x), Some(y)) => {
            if (x.exponent - y.exponent).abs() < 1e-12 {
                Some(PowerTail { exponent: x.exponent, left: x.left + y.left, right: x.right + y.right })
            } else if x.exponent < y.exponent {
                Some(x)
            } else {
                Some(y)
            }
        }
    }
}

impl GridDensity {
    fn center(&self) -> f64 {
        0.5 * (self.x0 + self.x_max())
    }

    /// Folded spectrum on a ring of `m >= len()` nodes with the grid centred
    /// in the window.
    pub fn spectrum(&self, m: usize) -> Result<Spectrum> {
        let n = self.len();
        if m < n || !m.is_power_of_two() {
            return Err(Error::invalid(format!("ring length {m} must be a power of two >= {n}")));
        }
        let lead = (m - n) / 2;
        let start = self.x0 - lead as f64 * self.dx;
        let period = m as f64 * self.dx;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|i| {
                let y = start + i as f64 * self.dx;
                let base = if (lead..lead + n).contains(&i) {
                    self.values[i - lead]
                } else {
                    self.tail.map_or(0.0, |t| t.density(y))
                };
                let images = self.tail.map_or(0.0, |t| t.image_sum(y, period));
                Complex64::new((base + images) * self.dx, 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        Ok(Spectrum { dx: self.dx, origin: start, bins: buf })
    }

    /// Padded ring length for an `n`-fold convolution.
    pub(crate) fn ring_len_for(&self, n: usize, tol: &Tolerances) -> Result<usize> {
        let factor = if self.tail.is_some() { 2 } else { 1 };
        fft_len(factor * n * self.len(), tol)
    }

    /// Density of `X_1 + … + X_n` for i.i.d. `X_i ~ p`.
    pub fn convolve_power(&self, n: usize, tol: &Tolerances) -> Result<GridDensity> {
        if n == 0 {
            return Err(Error::invalid("convolution power must be >= 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let m = self.ring_len_for(n, tol)?;
        let spec = self.spectrum(m)?.pow(n as u32);
        let images = self.tail.map(|t| t.scaled(n as f64));
        let out = spec.to_density(n as f64 * self.center(), images, tol)?;
        check_wrap(&out)?;
        Ok(out)
    }

    /// Density of `X + Y` for independent `X ~ self`, `Y ~ other`; both
    /// grids must share `dx`.
    pub fn convolve(&self, other: &GridDensity, tol: &Tolerances) -> Result<GridDensity> {
        if (self.dx - other.dx).abs() > 1e-12 * self.dx {
            return Err(Error::invalid("convolution needs equal grid spacings"));
        }
        let tail = combined_tail(self.tail, other.tail);
        let factor = if tail.is_some() { 2 } else { 1 };
        let m = fft_len(factor * (self.len() + other.len()), tol)?;
        let spec = self.spectrum(m)?.mul(&other.spectrum(m)?)?;
        let out = spec.to_density(self.center() + other.center(), tail, tol)?;
        check_wrap(&out)?;
        Ok(out)
    }

    /// `∫ e^{itx} p(x) dx`: trapezoid on the grid plus the tail integrals.
    pub fn cf(&self, t: f64) -> Result<Complex64> {
        let limit = PI / self.dx;
        if t.abs() > limit * (1.0 + 1e-12) {
            return Err(Error::BandLimit { t, limit });
        }
        let n = self.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (x, v)) in self.nodes().enumerate() {
            let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
            acc += Complex64::from_polar(w * v, t * x);
        }
        acc *= self.dx;
        if let Some(tail) = &self.tail {
            let g = tail.exponent;
            let (wl, wr) = (-self.x0, self.x_max());
            acc += oscillatory_power_integral(t * wr, g) * (tail.right * wr.powf(1.0 - g));
            acc += oscillatory_power_integral(-t * wl, g) * (tail.left * wl.powf(1.0 - g));
        }
        Ok(acc)
    }

    /// `∫_{t0 <= |t| <= π/dx} |p̂(t)| dt`.
    pub fn cf_tail_integral(&self, t0: f64) -> Result<f64> {
        let limit = PI / self.dx;
        if t0 < 0.0 || t0 > limit {
            return Err(Error::BandLimit { t: t0, limit });
        }
        let m = (8 * self.len()).next_power_of_two();
        Ok(self.spectrum(m)?.abs_integral_beyond(t0))
    }
}

/// For compactly supported results, mass at the ends means the ring was
/// too short and the convolution wrapped around.
fn check_wrap(g: &GridDensity) -> Result<()> {
    if g.tail().is_some() {
        return Ok(());
    }
    let v = g.values();
    let edge = v[0].max(v[v.len() - 1]);
    if edge > 1e-9 * g.peak() {
        return Err(Error::InsufficientPadding(format!("boundary value {edge:e} after convolution")));
    }
    Ok(())
}
