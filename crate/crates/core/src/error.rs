use serde::Serialize;
use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Clone, Error, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("extremal stable law (|beta| = 1) is not supported by {0}")]
    ExtremalUnsupported(&'static str),

    #[error("quadrature did not converge within the node budget ({nodes} nodes): {context}")]
    QuadratureBudget { nodes: usize, context: String },

    #[error("tail extrapolation did not stabilize: {0}")]
    TailExtrapolation(String),

    #[error("grid truncates too much mass (captured {mass:.6})")]
    Truncation { mass: f64 },

    #[error("negative density sample {value:e} at x = {x}")]
    NegativeSample { x: f64, value: f64 },

    #[error("insufficient padding: {0}")]
    InsufficientPadding(String),

    #[error("negative lobe {value:e} after Fourier inversion (grid too coarse)")]
    NegativeLobe { value: f64 },

    #[error("moment of order {order} diverges for tail exponent {tail_exponent}")]
    DivergentMoment { order: f64, tail_exponent: f64 },

    #[error("frequency {t} is outside the resolvable band |t| <= {limit}")]
    BandLimit { t: f64, limit: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
