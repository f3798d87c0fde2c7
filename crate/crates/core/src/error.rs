use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point label not present in the space.
    #[error("unknown point label: {0}")]
    UnknownPoint(String),

    /// Input data failed a structural precondition (empty set, non-covering
    /// family, missing field, ...).
    #[error("structural failure: {0}")]
    Structural(String),

    /// A matrix expected to be positive semidefinite was not, beyond tolerance.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig}, threshold {threshold}")]
    NotPsd { min_eig: f64, threshold: f64 },

    /// A construction rejected its input because a claimed property failed
    /// re-verification.
    #[error("rejected: {0}")]
    Rejected(String),

    /// Iterative numerics failed to converge within the iteration cap.
    #[error("no convergence after {iterations} iterations, residual {residual}")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
