//! Stable laws in the `(alpha, beta, c, a)` parametrization
//!
//! ```text
//! f(t) = exp{ i a t - c |t|^alpha (1 + i beta sign(t) omega(t, alpha)) }
//! omega(t, alpha) = tan(pi alpha / 2)      alpha != 1
//!                 = (2 / pi) log |t|       alpha == 1
//! ```
//!
//! The parametrization is not continuous in `alpha` at `alpha = 1`; the
//! `alpha = 1` family is its own branch. Note also the sign: for
//! `alpha != 1` a positive `beta` here skews mass to the *left* when
//! `1 < alpha < 2` (since `tan(pi alpha/2) < 0`) and to the right when
//! `alpha < 1`.

mod density;
mod sampler;

pub use density::{pdf, pdf_grid, StableDensity};
pub(crate) use density::truncation_point;
pub use sampler::{sample, sample_with};
pub(crate) use sampler::open_unit;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The quadruple `(alpha, beta, c, a)` identifying a stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StableClass {
    Normal,
    NonExtremal,
    Extremal,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, c: f64, a: f64) -> Result<Self> {
        let p = StableParams { alpha, beta, c, a };
        p.validate()?;
        Ok(p)
    }

    /// Standard normal: `alpha = 2, c = 1/2`.
    pub fn standard_normal() -> Self {
        StableParams { alpha: 2.0, beta: 0.0, c: 0.5, a: 0.0 }
    }

    /// Standard Cauchy: `alpha = 1, beta = 0, c = 1`.
    pub fn cauchy() -> Self {
        StableParams { alpha: 1.0, beta: 0.0, c: 1.0, a: 0.0 }
    }

    pub fn symmetric(alpha: f64, c: f64) -> Result<Self> {
        Self::new(alpha, 0.0, c, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::invalid(format!("alpha = {} outside (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta = {} outside [-1, 1]", self.beta)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("scale c = {} must be positive", self.c)));
        }
        if !self.a.is_finite() {
            return Err(Error::invalid("location a must be finite"));
        }
        Ok(())
    }

    /// Skewness actually in effect (`beta` is ignored at `alpha = 2`).
    pub fn effective_beta(&self) -> f64 {
        if self.alpha == 2.0 {
            0.0
        } else {
            self.beta
        }
    }

    /// Natural length scale `c^{1/alpha}`.
    pub fn scale(&self) -> f64 {
        self.c.powf(1.0 / self.alpha)
    }

    pub fn is_normal(&self) -> bool {
        self.alpha == 2.0
    }

    /// `omega(t, alpha)` for `t != 0`.
    fn omega(&self, t: f64) -> f64 {
        if self.alpha == 1.0 {
            2.0 / PI * t.abs().ln()
        } else {
            (PI * self.alpha / 2.0).tan()
        }
    }

    /// `(log|f(t)|, arg f(t))` for `t > 0`; shared by the quadratures.
    pub(crate) fn log_modulus_and_phase(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (0.0, 0.0);
        }
        let ta = t.abs().powf(self.alpha);
        let beta = self.effective_beta();
        let skew = if beta == 0.0 { 0.0 } else { beta * t.signum() * self.omega(t) };
        (-self.c * ta, self.a * t - self.c * ta * skew)
    }
}

pub fn classify(params: &StableParams) -> StableClass {
    if params.alpha == 2.0 {
        StableClass::Normal
    } else if params.beta.abs() < 1.0 {
        StableClass::NonExtremal
    } else {
        StableClass::Extremal
    }
}

/// Characteristic function `E e^{itZ}`.
pub fn cf(params: &StableParams, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (log_mod, phase) = params.log_modulus_and_phase(t);
    Complex64::from_polar(log_mod.exp(), phase)
}

/// Density of the normal law with parameters `(c, a)`: mean `a`, variance `2c`.
pub(crate) fn normal_log_pdf(params: &StableParams, x: f64) -> f64 {
    let var = 2.0 * params.c;
    let d = x - params.a;
    -0.5 * d * d / var - 0.5 * (2.0 * PI * var).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification() {
        let normal = StableParams::new(2.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(classify(&normal), StableClass::Normal);
        assert_eq!(classify(&StableParams::cauchy()), StableClass::NonExtremal);
        let ext = StableParams::new(0.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(classify(&ext), StableClass::Extremal);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.0, 1.5, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn cf_golden_values() {
        let z = cf(&StableParams::cauchy(), 1.0);
        assert!((z.re - (-1.0f64).exp()).abs() < 1e-15 && z.im.abs() < 1e-15);
        let z = cf(&StableParams::standard_normal(), 2.0);
        assert!((z.re - (-2.0f64).exp()).abs() < 1e-15 && z.im.abs() < 1e-15);
        let p = StableParams::new(1.0, 0.7, 2.0, -1.0).unwrap();
        assert_eq!(cf(&p, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cf_is_hermitian() {
        let p = StableParams::new(1.3, 0.4, 0.8, 0.25).unwrap();
        for &t in &[0.1, 0.7, 3.0] {
            let d = cf(&p, -t) - cf(&p, t).conj();
            assert!(d.norm() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn cf_modulus(alpha in 0.2f64..=2.0, beta in -0.99f64..0.99, c in 0.1f64..3.0,
                      a in -2.0f64..2.0, t in -20.0f64..20.0) {
            let p = StableParams::new(alpha, beta, c, a).unwrap();
            let m = cf(&p, t).norm();
            let expect = (-c * t.abs().powf(alpha)).exp();
            prop_assert!((m - expect).abs() < 1e-12);
        }
    }
}
