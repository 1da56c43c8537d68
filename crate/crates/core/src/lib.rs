//! Numerical laboratory for entropic convergence of normalized sums of
//! i.i.d. variables to stable laws.

pub mod cli;
pub mod convergence_lab;
pub mod decomposition;
pub mod entropy_criteria;
pub mod error;
pub mod format;
pub mod grid_density;
pub mod mc_oracle;
pub mod quadrature;
pub mod stable_law;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
