//! Upper bounds on `D(p̃_n‖ψ)` through the local limit gap
//! `Δ = sup |p̃_n - ψ|`.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::grid_density::{GridDensity, LogReference, StableGridReference};
use crate::quadrature::power_tail_integral;
use crate::stable_law::{StableDensity, StableParams};

/// Cut points scanned by [`bound_6_5_min`].
pub const BOUND_T_GRID: [f64; 11] = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0];

/// Half-width of the window tabulated by [`Target`], in units of the scale.
const TARGET_WINDOW: f64 = 50.0;

/// A stable target with its log-density and tail constants.
#[derive(Debug, Clone)]
pub struct Target {
    params: StableParams,
    reference: StableGridReference,
    tails: Option<(f64, f64)>,
}

impl Target {
    pub fn new(params: StableParams) -> Result<Self> {
        let w = TARGET_WINDOW * params.scale();
        let reference = StableGridReference::new(params, params.a - w, params.a + w, params.scale() / 32.0)?;
        let tails = if params.is_normal() { None } else { Some(StableDensity::new(params)?.tail_constants()?) };
        Ok(Target { params, reference, tails })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    pub fn reference(&self) -> &StableGridReference {
        &self.reference
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.reference.ln_pdf(x).exp()
    }

    /// `sup |p - ψ|` over the nodes of `p`.
    pub fn sup_gap(&self, p: &GridDensity) -> f64 {
        p.nodes().map(|(x, v)| (v - self.psi(x)).abs()).fold(0.0, f64::max)
    }

    /// `min ψ(x)(1+|x|)^{1+α}` over the nodes of `p` and both tail limits.
    pub fn c_low(&self, p: &GridDensity) -> f64 {
        let g = 1.0 + self.params.alpha;
        let grid = p.nodes().map(|(x, _)| self.psi(x) * (1.0 + x.abs()).powf(g)).fold(f64::INFINITY, f64::min);
        match self.tails {
            Some((c0, c1)) => grid.min(c0).min(c1),
            None => grid,
        }
    }
}

/// `C_ε = sup_{t >= 0} (t log t - (t - 1)) / |t - 1|^{1+ε}`, by a
/// log-spaced scan refined with golden-section search.
pub fn c_eps(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("eps = {eps} outside (0, 1]")));
    }
    let g = |t: f64| {
        if t == 0.0 {
            return 1.0;
        }
        let d = (t - 1.0).abs();
        if d < 1e-4 {
            return 0.0;
        }
        (t * t.ln() - (t - 1.0)) / d.powf(1.0 + eps)
    };
    let h = |u: f64| g(10f64.powf(u));
    let (lo, hi, steps) = (-15.0, 290.0, 6100);
    let du = (hi - lo) / steps as f64;
    let (mut best_u, mut best) = (lo, h(lo));
    for i in 1..=steps {
        let u = lo + i as f64 * du;
        let v = h(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let (mut a, mut b) = (best_u - du, best_u + du);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if h(c) > h(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(best.max(h(0.5 * (a + b))).max(g(0.0)))
}

/// `C_ε Δ^ε c_low^{-ε} ∫ (1+|x|)^{ε(1+α)} |p̃ - ψ| dx` for a non-normal
/// stable target.
pub fn bound_6_3(p_tilde: &GridDensity, params: &StableParams, eps: f64) -> Result<f64> {
    bound_6_3_with(p_tilde, &Target::new(*params)?, eps)
}

pub fn bound_6_3_with(p_tilde: &GridDensity, target: &Target, eps: f64) -> Result<f64> {
    let alpha = target.params.alpha;
    if target.params.is_normal() {
        return Err(Error::invalid("this bound needs a non-normal stable target"));
    }
    if !(eps > 0.0 && eps < alpha / (1.0 + alpha)) {
        return Err(Error::invalid(format!("eps = {eps} outside (0, alpha/(1+alpha))")));
    }
    let s = eps * (1.0 + alpha);
    let delta = target.sup_gap(p_tilde);
    let weighted = |x: f64, v: f64| (1.0 + x.abs()).powf(s) * (v - target.psi(x)).abs();
    let mut integral = p_tilde.trapezoid(weighted);
    let tail_density = |x: f64| p_tilde.tail().map_or(0.0, |t| t.density(x));
    let decay = 1.0 + alpha - s;
    integral += power_tail_integral(p_tilde.x_max(), decay, |x| weighted(x, tail_density(x)));
    integral += power_tail_integral(-p_tilde.x0(), decay, |x| weighted(-x, tail_density(-x)));
    Ok(c_eps(eps)? * delta.powf(eps) * integral / target.c_low(p_tilde).powf(eps))
}

/// `2 e^{T²/2} √(2π) Δ + ∫_{|x|>T} (x² + log(M√(2π))) p̃ dx` for the
/// standard normal target, plus `max(0, ∫_{|x|>T} (φ - p̃))`, the term
/// dropped when the integral is split at `T` (without it the right side
/// need not dominate `D`).
pub fn bound_6_5(p_tilde: &GridDensity, t: f64, m_sup: f64) -> Result<f64> {
    if !(t > 0.0 && m_sup > 0.0) {
        return Err(Error::invalid("bound needs T > 0 and M > 0"));
    }
    let log_phi = |x: f64| -0.5 * x * x - 0.5 * (2.0 * PI).ln();
    let delta = p_tilde.nodes().map(|(x, v)| (v - log_phi(x).exp()).abs()).fold(0.0, f64::max);
    // share of each node's cell lying beyond the cut
    let dx = p_tilde.dx();
    let outside = |x: f64| ((x.abs() + 0.5 * dx - t) / dx).clamp(0.0, 1.0);
    let weight = |x: f64| x * x + (m_sup * (2.0 * PI).sqrt()).ln();
    let mut outer = p_tilde.trapezoid(|x, v| outside(x) * weight(x) * v);
    let mut mass = p_tilde.trapezoid(|x, v| outside(x) * v);
    if let Some(tail) = p_tilde.tail() {
        if tail.exponent <= 3.0 {
            return Ok(f64::INFINITY);
        }
        let decay = tail.exponent - 2.0;
        outer += power_tail_integral(p_tilde.x_max(), decay, |x| weight(x) * tail.density(x));
        outer += power_tail_integral(-p_tilde.x0(), decay, |x| weight(x) * tail.density(-x));
        let (l, r) = p_tilde.tail_masses();
        mass += l + r;
    }
    let phi_outside = erfc(t / 2f64.sqrt());
    Ok(2.0 * (0.5 * t * t).exp() * (2.0 * PI).sqrt() * delta + outer + (phi_outside - mass).max(0.0))
}

/// Minimum of [`bound_6_5`] over [`BOUND_T_GRID`], with the minimizing `T`.
pub fn bound_6_5_min(p_tilde: &GridDensity, m_sup: f64) -> Result<(f64, f64)> {
    let mut best = (f64::INFINITY, BOUND_T_GRID[0]);
    for &t in &BOUND_T_GRID {
        let v = bound_6_5(p_tilde, t, m_sup)?;
        if v < best.0 {
            best = (v, t);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_eps_values() {
        assert!((c_eps(1.0).unwrap() - 1.0).abs() < 1e-9);
        // for small eps the supremum sits near t = e^{1/eps}
        let c = c_eps(0.1).unwrap();
        let t = (10.0f64).exp();
        let at = (t * t.ln() - (t - 1.0)) / (t - 1.0).powf(1.1);
        assert!(c >= at && c < 1.05 * at, "{c} vs {at}");
        assert!(c_eps(0.25).unwrap() > 1.0);
        assert!(c_eps(0.0).is_err());
    }

    #[test]
    fn elementary_inequality_holds_with_c_eps() {
        for eps in [0.1, 0.25, 0.5, 1.0] {
            let c = c_eps(eps).unwrap();
            for k in 0..2000 {
                let t = 1e-6 * 1.02f64.powi(k);
                let lhs = t * t.ln();
                let rhs = (t - 1.0) + c * (t - 1.0).abs().powf(1.0 + eps);
                assert!(lhs <= rhs + 1e-12 * (1.0 + lhs.abs()), "eps={eps} t={t}");
            }
        }
    }

    #[test]
    fn bounds_vanish_at_the_target() {
        let alpha = StableParams::symmetric(1.5, 1.0).unwrap();
        let psi = GridDensity::from_stable(&alpha, -60.0, 60.0, 1 << 12).unwrap();
        let b = bound_6_3(&psi, &alpha, 0.25).unwrap();
        assert!(b < 1e-3, "{b}");

        let phi = GridDensity::from_stable(&StableParams::standard_normal(), -10.0, 10.0, 1 << 12).unwrap();
        for t in [1.0, 3.0, 6.0] {
            let b = bound_6_5(&phi, t, phi.peak()).unwrap();
            let tail = erfc(t / 2f64.sqrt());
            // Δ is round-off, which leaves the φ-tail integral of x² (M√2π ≈ 1)
            let delta = Target::new(StableParams::standard_normal()).unwrap().sup_gap(&phi);
            let first = 2.0 * (0.5 * t * t).exp() * (2.0 * PI).sqrt() * delta;
            let second = 2.0 * (t * (-0.5 * t * t).exp() / (2.0 * PI).sqrt()) + tail;
            assert!((b - first - second).abs() < 1e-4 * second, "T={t} {b} {first} {second}");
        }
    }

    #[test]
    fn bounds_dominate_relative_entropy() {
        let n = StableParams::standard_normal();
        let r3 = 3f64.sqrt();
        let u = GridDensity::from_function(move |x| if x.abs() < r3 { 0.5 / r3 } else { 0.0 }, -4.0, 4.0, 1 << 12)
            .unwrap();
        let tri = u.convolve_power(2, &Default::default()).unwrap().affine(0.0, 2f64.sqrt()).unwrap();
        let target = Target::new(n).unwrap();
        let d = tri.relative_entropy(target.reference());
        let (b, _) = bound_6_5_min(&tri, tri.peak()).unwrap();
        assert!(b >= d, "{b} < {d}");

        let alpha = StableParams::symmetric(1.5, 1.0).unwrap();
        let target = Target::new(alpha).unwrap();
        let cauchy_like = GridDensity::from_stable(&StableParams::symmetric(1.5, 1.3).unwrap(), -60.0, 60.0, 1 << 12)
            .unwrap();
        let d = cauchy_like.relative_entropy(target.reference());
        for eps in [0.1, 0.25] {
            let b = bound_6_3_with(&cauchy_like, &target, eps).unwrap();
            assert!(b >= d, "eps={eps} {b} < {d}");
        }
    }
}
