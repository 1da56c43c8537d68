//! Fixed Gauss rules and the power-law tail integrals built on them.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const LEGENDRE_ORDER: usize = 16;
const LAGUERRE_ORDER: usize = 32;

/// Nodes and weights of a Gauss rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

/// Gauss–Laguerre rule for `∫_0^∞ f(s) e^{-s} ds`.
pub fn gauss_laguerre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
        }
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * nf * p2);
    }
    GaussRule { nodes, weights }
}

pub(crate) fn legendre4() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(4))
}

pub(crate) fn legendre16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(LEGENDRE_ORDER))
}

pub(crate) fn laguerre32() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_laguerre(LAGUERRE_ORDER))
}

/// Integrate `f` over `[a, b]` with one 16-point Gauss–Legendre panel.
pub(crate) fn gl_panel<F: Fn(f64) -> T, T>(a: f64, b: f64, f: F) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let rule = legendre16();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::default();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc + f(mid + half * x) * (w * half);
    }
    acc
}

/// `∫_w^∞ g(x) dx` for an integrand decaying like `x^{-decay}` up to
/// logarithmic factors; `decay` must exceed one.
///
/// The substitution `x = w e^{s/(decay-1)}` turns the integral into a
/// Laplace-type integral handled by Gauss–Laguerre.
pub fn power_tail_integral<F: Fn(f64) -> f64>(w: f64, decay: f64, g: F) -> f64 {
    debug_assert!(w > 0.0 && decay > 1.0);
    let rule = laguerre32();
    let k = decay - 1.0;
    let mut acc = 0.0;
    for (s, wt) in rule.nodes.iter().zip(&rule.weights) {
        let x = w * (s / k).exp();
        if !x.is_finite() {
            continue;
        }
        let v = g(x) * x * s.exp() / k;
        if v.is_finite() {
            acc += wt * v;
        }
    }
    acc
}

/// `∫_1^∞ u^{-gamma} e^{i omega u} du` for `gamma > 1`.
pub fn oscillatory_power_integral(omega: f64, gamma: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(1.0 / (gamma - 1.0), 0.0);
    }
    if omega < 0.0 {
        return oscillatory_power_integral(-omega, gamma).conj();
    }
    let upper = (8.0 / omega).max(1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    // geometric panels on [1, upper]; each panel spans at most 4 radians
    let mut a = 1.0;
    while a < upper {
        let b = (2.0 * a).min(upper);
        acc += gl_panel(a, b, |u| {
            Complex64::from_polar(u.powf(-gamma), omega * u)
        });
        a = b;
    }
    // rotate the remaining ray into the upper half plane: u = upper + i s / omega
    let rule = laguerre32();
    let mut ray = Complex64::new(0.0, 0.0);
    for (s, wt) in rule.nodes.iter().zip(&rule.weights) {
        let z = Complex64::new(upper, s / omega);
        ray += z.powf(-gamma) * *wt;
    }
    let phase = Complex64::from_polar(1.0, omega * upper);
    acc + Complex64::new(0.0, 1.0) * phase * ray / omega
}

/// Power-law tail model `c_left |x|^{-exponent}` (x → -∞) and
/// `c_right x^{-exponent}` (x → +∞), anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub exponent: f64,
    pub left: f64,
    pub right: f64,
}

impl PowerTail {
    pub fn symmetric(exponent: f64, coeff: f64) -> Self {
        PowerTail { exponent, left: coeff, right: coeff }
    }

    /// Tail density at `x` (the side is chosen by the sign of `x`).
    pub fn density(&self, x: f64) -> f64 {
        let c = if x < 0.0 { self.left } else { self.right };
        if x == 0.0 {
            return f64::INFINITY;
        }
        c * x.abs().powf(-self.exponent)
    }

    /// Mass beyond `x < 0` on the left.
    pub fn left_mass(&self, x: f64) -> f64 {
        self.left * (-x).powf(1.0 - self.exponent) / (self.exponent - 1.0)
    }

    /// Mass beyond `x > 0` on the right.
    pub fn right_mass(&self, x: f64) -> f64 {
        self.right * x.powf(1.0 - self.exponent) / (self.exponent - 1.0)
    }

    /// Model for the affine image `X/b - a`, to leading order in the tails.
    pub fn affine(&self, b: f64) -> PowerTail {
        let s = b.powf(1.0 - self.exponent);
        PowerTail { exponent: self.exponent, left: self.left * s, right: self.right * s }
    }

    pub fn scaled(&self, factor: f64) -> PowerTail {
        PowerTail { exponent: self.exponent, left: self.left * factor, right: self.right * factor }
    }

    /// `Σ_{k ≠ 0} tail(x + k·period)` for a point `x` inside one period.
    pub fn image_sum(&self, x: f64, period: f64) -> f64 {
        let mut acc = 0.0;
        for sign in [-1.0f64, 1.0] {
            acc += self.ray_sum(x, sign * period);
        }
        acc
    }

    /// `Σ_{k ≥ 1} tail(x + k·step)`: eight explicit terms, then an
    /// Euler–Maclaurin remainder. Assumes `|x| < |step|`.
    fn ray_sum(&self, x: f64, step: f64) -> f64 {
        const TERMS: usize = 8;
        let mut acc = 0.0;
        for k in 1..=TERMS {
            acc += self.density(x + k as f64 * step);
        }
        let (c, d, p) = if step < 0.0 { (self.left, -x, -step) } else { (self.right, x, step) };
        let g = self.exponent;
        let z = d + (TERMS as f64 + 1.0) * p;
        let f = c * z.powf(-g);
        acc + f * z / ((g - 1.0) * p) + 0.5 * f + g * p * f / (12.0 * z)
            - g * (g + 1.0) * (g + 2.0) * p.powi(3) * f / (720.0 * z.powi(3))
    }
}
