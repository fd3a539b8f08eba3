use thiserror::Error;

/// Errors surfaced by the library. Domain errors reject inputs outside an
/// operation's contract; the remaining variants report numerical diagnostics
/// that callers may want to branch on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested absolute error.
    #[error("quadrature budget exhausted: {panels} panels used, error estimate {achieved:e} above target {target:e}")]
    QuadratureBudget {
        panels: usize,
        achieved: f64,
        target: f64,
    },

    /// Sign-change isolation on a log ratio failed (no usable evaluations, or
    /// the scan found an implausible number of crossings).
    #[error("crossing isolation failed: {0}")]
    CrossingIsolation(String),

    /// A rejection-sampler envelope below the known density-ratio supremum.
    #[error("envelope log C = {envelope} is below the required log rho = {required}")]
    EnvelopeTooSmall { envelope: f64, required: f64 },

    /// A goodness-of-fit helper was handed too little data to form bins.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
