use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("frequency {omega} outside tabulated range [{min}, {max}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("frequency grid not strictly increasing at line {line}")]
    NonMonotone { line: usize },

    #[error("passivity violation: {0}")]
    Passivity(String),

    #[error("thermal factor is singular at omega = 0 for T > 0")]
    SingularPoint,

    #[error("polarizability pole at eps = -2")]
    Pole,

    #[error("reflection coefficient |r| = {magnitude} exceeds 1 for a passive medium at k_par = {k_par}")]
    BranchCut { magnitude: f64, k_par: f64 },

    #[error("quadrature did not converge: partial = {partial:e}, achieved error = {achieved:e}")]
    NotConverged { partial: f64, achieved: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
