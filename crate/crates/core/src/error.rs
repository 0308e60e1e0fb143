use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tabulated quantity was queried outside its grid.
    #[error("range error: {value} outside [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    /// Adaptive quadrature (or an iterative series) stopped before reaching
    /// the requested tolerance.
    #[error("no convergence: achieved error {achieved:e}, requested {requested:e}")]
    Convergence { achieved: f64, requested: f64 },

    /// The requested evaluation path does not exist for this input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Nonlinear least squares did not converge.
    #[error("fit failed after {iterations} iterations (residual sum {residual:e})")]
    Fit { iterations: usize, residual: f64 },

    /// Malformed external data (CSV tables, config values).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
