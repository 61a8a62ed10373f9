//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerics, generators, solvers and certificates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("SVD did not converge within {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    SvdNoConvergence { sweeps: usize, residual: f64 },

    #[error("power iteration exhausted {maxit} iterations (last estimate {last:.12e})")]
    PowerIterationNoConvergence { maxit: usize, last: f64 },

    #[error("Newton solve exhausted {maxit} iterations (gradient residual {residual:.3e})")]
    NewtonNoConvergence { maxit: usize, residual: f64 },

    #[error("oracle accuracy check failed: {0}")]
    OracleAccuracy(String),

    #[error("transfer function evaluated too close to a pole at gamma*z = {re} + {im}i (|denominator| = {denom:.3e})")]
    NearPole { re: f64, im: f64, denom: f64 },

    #[error("singular denominator in sector map: m*hbar - L_tilde = 0")]
    SingularDenominator,

    #[error("linear solve hit a zero pivot at row {row}")]
    SingularMatrix { row: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("insufficient decay data for rate fit: {0}")]
    InsufficientDecay(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
