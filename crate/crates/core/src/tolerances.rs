//! Numerical tolerances shared across modules.
//!
//! Every threshold the library applies lives here so tests can tighten
//! them in one place.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Allowed deviation of a grid density's mass from one.
    pub mass_tol: f64,
    /// Absolute accuracy targeted by the grid quadratures.
    pub quadrature_tol: f64,
    /// Minimum captured mass before `from_function` refuses a grid.
    pub min_captured_mass: f64,
    /// Negative values above this (times the peak) are treated as round-off.
    pub negative_clip: f64,
    /// Negative lobes below this (times the peak) abort an inversion.
    pub negative_lobe: f64,
    /// Largest FFT length the convolution engine may allocate.
    pub max_fft_len: usize,
    /// Node budget for pointwise characteristic-function inversion.
    pub max_inversion_nodes: usize,
    /// Relative change that marks a grid integral as unconverged.
    pub widening_rel_change: f64,
    /// Exponent for the integrability of `psi^gamma` in the converse criterion.
    pub gamma_converse: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mass_tol: 1e-6,
            quadrature_tol: 1e-6,
            min_captured_mass: 0.99,
            negative_clip: 1e-9,
            negative_lobe: 1e-7,
            max_fft_len: 1 << 23,
            max_inversion_nodes: 1 << 24,
            widening_rel_change: 1e-3,
            gamma_converse: 0.9,
        }
    }
}
