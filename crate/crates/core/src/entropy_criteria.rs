//! Finiteness criteria for relative entropy with respect to a stable law.
//!
//! For a non-extremal stable density `ψ` and a density `p`,
//! `h(p) <= ∫ p log(1/ψ)` whenever the right side is finite, and then
//! `D(p‖ψ) = ∫ p log(1/ψ) - h(p)`. Finiteness of `D` reduces to finiteness
//! of the entropy together with a second moment (normal `ψ`) or a
//! logarithmic moment (other stable `ψ`).

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid_density::{GridDensity, LogReference, StableGridReference, TailGrowth};
use crate::quadrature::gl_panel;
use crate::stable_law::{classify, StableClass, StableParams};
use crate::tolerances::Tolerances;

/// A real number or a signed infinity; infinities serialize as the strings
/// `"+inf"` and `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn value(&self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => *v,
            ExtendedReal::PosInf => f64::INFINITY,
            ExtendedReal::NegInf => f64::NEG_INFINITY,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::PosInf => s.serialize_str("+inf"),
            ExtendedReal::NegInf => s.serialize_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Finite,
    Infinite,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitenessReport {
    pub abs_continuity_ok: bool,
    /// `E log⁺(1/ψ(X))`.
    pub log_plus_moment: ExtendedReal,
    pub entropy_value: ExtendedReal,
    pub second_moment: ExtendedReal,
    /// `E log(1 + |X|)`.
    pub log_moment: ExtendedReal,
    pub verdict: Verdict,
    /// Quantities whose grid integral did not settle under widening.
    pub unsettled: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBoundCheck {
    pub h: f64,
    pub bound: ExtendedReal,
    pub gap: ExtendedReal,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityRow {
    pub n: usize,
    pub entropy: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub n0: usize,
    pub rows: Vec<MonotonicityRow>,
    pub violations: Vec<usize>,
    pub pass: bool,
}

/// Allowed decrease of `h(S_n)` below `h(S_{n0})` in [`monotonicity_check`].
pub const ENTROPY_SLACK: f64 = 1e-4;

/// Tabulated `log ψ` covering the grid of `p`.
pub fn reference_for(p: &GridDensity, params: &StableParams) -> Result<StableGridReference> {
    if classify(params) == StableClass::Extremal {
        return Err(Error::ExtremalUnsupported("entropy criteria"));
    }
    StableGridReference::new(*params, p.x0(), p.x_max(), p.dx())
}

/// `∫ p g` on the grid, the tail-model contribution (`+∞` if divergent)
/// and, for grids without a tail model, the change when the window is
/// doubled with the local power decay at each edge extrapolated outwards.
struct Windowed {
    grid: f64,
    tail: f64,
    widening: f64,
}

impl Windowed {
    fn new<G: Fn(f64, f64) -> f64>(p: &GridDensity, growth: TailGrowth, g: G) -> Self {
        let grid = p.trapezoid(&g);
        let tail = p.tail_integral(growth, &g);
        let widening = if p.tail().is_some() { 0.0 } else { edge_extension(p, &g) };
        Windowed { grid, tail, widening }
    }

    fn resolve(&self, tol: &Tolerances) -> (ExtendedReal, bool) {
        let total = self.grid + self.tail;
        if !total.is_finite() {
            return (ExtendedReal::from(total), true);
        }
        let settled = self.widening.abs() <= tol.widening_rel_change * self.grid.abs().max(f64::MIN_POSITIVE);
        (ExtendedReal::Finite(total), settled)
    }
}

/// `∫ g(x, v(x))` over `[x_b, 2 x_b]` on each side, with `v` the power law
/// through the edge node and the node a tenth of the grid inwards.
fn edge_extension<G: Fn(f64, f64) -> f64>(p: &GridDensity, g: &G) -> f64 {
    let n = p.len();
    let k = (n / 10).max(1);
    let side = |inner: usize, outer: usize| -> f64 {
        let (xa, va) = (p.x(inner), p.values()[inner]);
        let (xb, vb) = (p.x(outer), p.values()[outer]);
        if !(vb > 0.0 && va > 0.0 && xb.abs() > xa.abs() && xa * xb > 0.0) {
            return 0.0;
        }
        let decay = (va / vb).ln() / (xb / xa).ln();
        let v = |x: f64| vb * (x / xb).abs().powf(-decay);
        gl_panel(xb.min(2.0 * xb), xb.max(2.0 * xb), |x| g(x, v(x)))
    };
    side(k, 0) + side(n - 1 - k, n - 1)
}

/// `E log⁺(1/ψ(X))`.
pub fn log_plus_reference_moment(p: &GridDensity, params: &StableParams) -> Result<ExtendedReal> {
    let r = reference_for(p, params)?;
    Ok(log_plus_with(p, &r))
}

fn log_plus_with(p: &GridDensity, r: &dyn LogReference) -> ExtendedReal {
    let g = |x: f64, v: f64| v * (-r.ln_pdf(x)).max(0.0);
    ExtendedReal::from(p.trapezoid(g) + p.tail_integral(r.growth(), g))
}

/// `h(p) <= ∫ p log(1/ψ)`; the gap is `D(p‖ψ)`.
pub fn entropy_upper_bound_check(p: &GridDensity, params: &StableParams) -> Result<UpperBoundCheck> {
    let r = reference_for(p, params)?;
    let h = p.entropy();
    let bound = p.cross_entropy(&r);
    Ok(UpperBoundCheck {
        h,
        bound: bound.into(),
        gap: (bound - h).into(),
        pass: h <= bound + 1e-6,
    })
}

/// `D(p‖ψ) + h(p) - ∫ p log(1/ψ)`, each term computed independently.
pub fn identity_2_3_residual(p: &GridDensity, params: &StableParams) -> Result<f64> {
    let r = reference_for(p, params)?;
    Ok(residual_with(p, &r))
}

pub(crate) fn residual_with(p: &GridDensity, r: &dyn LogReference) -> f64 {
    p.relative_entropy(r) + p.entropy() - p.cross_entropy(r)
}

pub fn finiteness_diagnosis(p: &GridDensity, params: &StableParams) -> Result<FinitenessReport> {
    finiteness_diagnosis_with(p, params, &Tolerances::default())
}

pub fn finiteness_diagnosis_with(
    p: &GridDensity,
    params: &StableParams,
    tol: &Tolerances,
) -> Result<FinitenessReport> {
    let r = reference_for(p, params)?;
    let abs_continuity_ok = p.values().iter().all(|v| v.is_finite()) && (p.mass() - 1.0).abs() < tol.mass_tol;
    let mut unsettled = Vec::new();
    let mut resolve = |name: &str, w: Windowed| {
        let (v, ok) = w.resolve(tol);
        if !ok {
            unsettled.push(name.to_string());
        }
        (v, ok)
    };
    let (entropy_value, entropy_ok) = resolve(
        "entropy",
        Windowed::new(p, TailGrowth::Logarithmic, |_, v| if v > 0.0 { -v * v.ln() } else { 0.0 }),
    );
    let (second_moment, second_ok) = resolve("second_moment", Windowed::new(p, TailGrowth::Quadratic, |x, v| x * x * v));
    let (log_moment, log_ok) =
        resolve("log_moment", Windowed::new(p, TailGrowth::Logarithmic, |x, v| x.abs().ln_1p() * v));
    let log_plus_moment = log_plus_with(p, &r);

    let required = if params.is_normal() {
        [(second_moment, second_ok), (entropy_value, entropy_ok)]
    } else {
        [(log_moment, log_ok), (entropy_value, entropy_ok)]
    };
    let verdict = if !abs_continuity_ok || required.iter().any(|(v, _)| !v.is_finite()) {
        Verdict::Infinite
    } else if required.iter().any(|(_, ok)| !ok) {
        Verdict::Undetermined
    } else {
        Verdict::Finite
    };
    Ok(FinitenessReport {
        abs_continuity_ok,
        log_plus_moment,
        entropy_value,
        second_moment,
        log_moment,
        verdict,
        unsettled,
    })
}

/// Along `S_n = X_1 + … + X_n`, `n0 <= n <= n_max`: the entropy never drops
/// below `h(S_{n0})` and the finiteness verdict stays `Finite`.
pub fn monotonicity_check(
    source: &GridDensity,
    params: &StableParams,
    n0: usize,
    n_max: usize,
    tol: &Tolerances,
) -> Result<MonotonicityReport> {
    if n0 == 0 || n_max < n0 {
        return Err(Error::invalid(format!("need 1 <= n0 <= n_max, got {n0}, {n_max}")));
    }
    let mut rows = Vec::new();
    for n in n0..=n_max {
        let s_n = source.convolve_power(n, tol)?;
        let verdict = finiteness_diagnosis_with(&s_n, params, tol)?.verdict;
        rows.push(MonotonicityRow { n, entropy: s_n.entropy(), verdict });
    }
    let h0 = rows[0].entropy;
    let violations: Vec<usize> = rows
        .iter()
        .filter(|r| r.entropy < h0 - ENTROPY_SLACK || r.verdict != Verdict::Finite)
        .map(|r| r.n)
        .collect();
    Ok(MonotonicityReport { n0, pass: violations.is_empty(), rows, violations })
}
