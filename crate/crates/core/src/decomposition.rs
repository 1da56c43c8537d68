//! Binomial decomposition of convolution powers.
//!
//! A density is split as `p = (1-b) ρ1 + b ρ0` with `ρ0` the normalized
//! restriction to the highest-level set of mass `b` and `ρ1` the bounded
//! remainder. Then `p^{*n} = ρ_{n1} + ρ_{n0}` where `ρ_{n0}` collects the
//! binomial terms with at most one factor `ρ1`, of total mass
//! `ε_n = b^n + n(1-b)b^{n-1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid_density::{distance, GridDensity, Metric, Spectrum};
use crate::quadrature::PowerTail;
use crate::tolerances::Tolerances;

/// `ε_n = b^n + n(1-b)b^{n-1}`.
pub fn eps_n(b: f64, n: usize) -> f64 {
    let n_i = n as i32;
    b.powi(n_i) + n as f64 * (1.0 - b) * b.powi(n_i - 1)
}

#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Mass of the high-level part.
    pub b: f64,
    /// Level of `p` separating the two parts (`p <= level` off the high set).
    pub level: f64,
    /// Bound on the normalized bounded part: `sup ρ1 = level / (1-b)`.
    pub m_bound: f64,
    pub rho1: GridDensity,
    pub rho0: GridDensity,
    source: GridDensity,
}

impl SplitResult {
    pub fn source(&self) -> &GridDensity {
        &self.source
    }
}

/// Splits off the highest-level set of mass `b`.
///
/// Nodes are taken in decreasing order of value, ties left to right; the
/// node that crosses mass `b` is shared fractionally, so the high part has
/// mass `b` exactly (trapezoid weights).
pub fn split(p: &GridDensity, b: f64) -> Result<SplitResult> {
    if !(b > 0.0 && b < 0.5) {
        return Err(Error::invalid(format!("split mass b = {b} outside (0, 1/2)")));
    }
    let n = p.len();
    let v = p.values();
    let w = |j: usize| if j == 0 || j + 1 == n { 0.5 } else { 1.0 } * p.dx();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
    let mut high = vec![0.0; n];
    let mut taken = 0.0;
    for &j in &order {
        let mass = w(j) * v[j];
        if taken + mass <= b {
            high[j] = v[j];
            taken += mass;
        } else {
            high[j] = v[j] * (b - taken) / mass;
            break;
        }
    }
    let low: Vec<f64> = v.iter().zip(&high).map(|(a, h)| (a - h).max(0.0)).collect();
    let level = low.iter().cloned().fold(0.0, f64::max);
    let rho0 = GridDensity::from_values(p.x0(), p.dx(), high, None)?;
    let rho1 = GridDensity::from_values(p.x0(), p.dx(), low, p.tail().copied())?;
    Ok(SplitResult { b, level, m_bound: rho1.peak(), rho1, rho0, source: p.clone() })
}

/// `p̃_n`, `p_{n0}` and `p_n`, all in the normalized frame `S_n/b_n - a_n`.
#[derive(Debug, Clone)]
pub struct ModifiedPair {
    pub n: usize,
    pub b: f64,
    pub eps_n: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub tilde_p_n: GridDensity,
    pub p_n0: GridDensity,
    pub p_n: GridDensity,
    /// `sup_t |f̃_n(t) - f_n(t)|` over the resolvable band.
    pub cf_gap_sup: f64,
    /// `sup ρ_{n1}` before normalization (unnormalized frame).
    pub rho_n1_sup: f64,
    rho_n1: Spectrum,
}

impl ModifiedPair {
    /// `∫_{|t| >= t0 b_n} |f̃_n(t)| dt = b_n/(1-ε_n) ∫_{|t| >= t0} |ρ̂_{n1}(t)| dt`.
    pub fn cf_tail_integral(&self, t0: f64) -> f64 {
        self.b_n / (1.0 - self.eps_n) * self.rho_n1.abs_integral_beyond(t0)
    }

    /// Upper bound `b_n/(1-ε_n) · sup ρ_{n1}` on `sup p̃_n`.
    pub fn tilde_sup_bound(&self) -> f64 {
        self.b_n / (1.0 - self.eps_n) * self.rho_n1_sup
    }
}

fn tail_of(t: Option<PowerTail>, k: f64) -> Option<PowerTail> {
    t.map(|t| t.scaled(k))
}

/// Builds `p̃_n` and `p_{n0}` in the Fourier domain:
/// `ρ̂_{n1} = p̂^n - b^n ρ̂0^n - n(1-b)b^{n-1} ρ̂1 ρ̂0^{n-1}`.
pub fn modified_density(split: &SplitResult, n: usize, a_n: f64, b_n: f64, tol: &Tolerances) -> Result<ModifiedPair> {
    if n < 2 {
        return Err(Error::invalid("the modified density needs n >= 2"));
    }
    let b = split.b;
    let eps = eps_n(b, n);
    let source = &split.source;
    let m = source.ring_len_for(n, tol)?;
    let p_hat = source.spectrum(m)?;
    let r0 = split.rho0.spectrum(m)?;
    let r1 = p_hat.combine(1.0 / (1.0 - b), &r0, -b / (1.0 - b))?;
    let r0_pow = r0.pow(n as u32 - 1);
    let zero_ones = r0_pow.mul(&r0)?;
    let one_one = r1.mul(&r0_pow)?;
    let w0 = b.powi(n as i32);
    let w1 = n as f64 * (1.0 - b) * b.powi(n as i32 - 1);
    let pn = p_hat.pow(n as u32);
    let rho_n0 = zero_ones.combine(w0, &one_one, w1)?;
    let rho_n1 = pn.combine(1.0, &rho_n0, -1.0)?;
    let unit_n0 = zero_ones.combine(w0 / eps, &one_one, w1 / eps)?;

    let center = n as f64 * 0.5 * (source.x0() + source.x_max());
    let tail = source.tail().copied();
    let rho1_tail = split.rho1.tail().copied();
    // tails to leading order: p^{*n} ~ n c, ρ1 * ρ0^{*(n-1)} ~ c/(1-b)
    let tail_n = tail_of(tail, n as f64);
    let tail_n1 = tail_of(tail, n as f64 * (1.0 - b.powi(n as i32 - 1)));
    let tail_n0 = tail_of(rho1_tail, w1 / eps);

    let sums = pn.to_density(center, tail_n, tol)?;
    let rho_n1_density = rho_n1.to_density(center, tail_n1, tol)?;
    let rho_n1_sup = rho_n1_density.peak() / rho_n1_density.renormalization();
    let n0 = unit_n0.to_density(center, tail_n0, tol)?;

    let cf_gap_sup = rho_n1
        .bins()
        .iter()
        .zip(pn.bins())
        .map(|(r, p)| (r / (1.0 - eps) - p).norm())
        .fold(0.0, f64::max);

    Ok(ModifiedPair {
        n,
        b,
        eps_n: eps,
        a_n,
        b_n,
        tilde_p_n: rho_n1_density.affine(a_n, b_n)?,
        p_n0: n0.affine(a_n, b_n)?,
        p_n: sums.affine(a_n, b_n)?,
        cf_gap_sup,
        rho_n1_sup,
        rho_n1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        BoundCheck { lhs, rhs, margin: rhs - lhs, pass: lhs < rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CfTail {
    pub integral: f64,
    pub fitted_c: Option<f64>,
}

/// Exponential fit `I_n ≈ C b_n e^{-c n}` of the characteristic-function
/// tail integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub c: f64,
    pub big_c: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub n: usize,
    pub b: f64,
    pub s: f64,
    pub t0: f64,
    pub eps_n: f64,
    pub eps_bound: BoundCheck,
    pub l1_bound: BoundCheck,
    pub cf_bound: BoundCheck,
    pub weighted_l1: BoundCheck,
    pub cf_tail: CfTail,
}

/// The four `2^{-n}` checks for one `n`; failures are report entries.
pub fn section3_checks(split: &SplitResult, pair: &ModifiedPair, s: f64, t0: f64, fit: Option<DecayFit>) -> CheckReport {
    let target = 0.5f64.powi(pair.n as i32);
    let l1 = distance(&pair.tilde_p_n, &pair.p_n, Metric::L1);
    let wl1 = distance(&pair.tilde_p_n, &pair.p_n, Metric::WeightedL1(s));
    CheckReport {
        n: pair.n,
        b: split.b,
        s,
        t0,
        eps_n: pair.eps_n,
        eps_bound: BoundCheck::new(pair.eps_n, pair.n as f64 * split.b.powi(pair.n as i32 - 1)),
        l1_bound: BoundCheck::new(l1, target),
        cf_bound: BoundCheck::new(pair.cf_gap_sup, target),
        weighted_l1: BoundCheck::new(wl1, target),
        cf_tail: CfTail { integral: pair.cf_tail_integral(t0), fitted_c: fit.map(|f| f.c) },
    }
}

/// Least-squares line through `(n, log(I_n / b_n))`; `c` is minus the
/// slope.
pub fn fit_cf_tail_decay(points: &[(usize, f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, b_n, i)| *i > 0.0 && *b_n > 0.0)
        .map(|(n, b_n, i)| (*n as f64, (i / b_n).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::invalid("decay fit needs at least three positive integrals"));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(DecayFit { c: -slope, big_c: intercept.exp(), r_squared })
}
