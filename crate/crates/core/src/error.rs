use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The truncation cap was reached before the stopping rule fired.
    #[error("no convergence after {terms} terms (partial value {partial})")]
    Convergence { terms: usize, partial: Complex64 },

    #[error("pole: {0}")]
    Pole(String),

    #[error("series argument |z| = {0} is outside the convergence guard")]
    Divergence(f64),

    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    #[error("functions live on different lattices")]
    LatticeMismatch,

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("parameters are not calibrated: c = {c}, expected q^(-2 gamma) = {expected}")]
    NotCalibrated { c: f64, expected: f64 },

    #[error("parity mismatch: {0}")]
    Parity(String),

    #[error("inconsistent closed forms: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
