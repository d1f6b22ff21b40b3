//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular (zero determinant)")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigen-solver failed to converge")]
    EigenConvergence,

    #[error("Jordan structure is numerically ambiguous: {detail}; eigenvalue clusters: {clusters:?}")]
    JordanAmbiguous {
        detail: String,
        /// (re, im, multiplicity) per cluster.
        clusters: Vec<(f64, f64, usize)>,
    },

    #[error("enumeration cap of {cap} points exceeded (at least {partial} found)")]
    EnumerationCap { cap: usize, partial: usize },

    #[error("membership numerically ambiguous for {count} candidate(s); near misses: {near_misses:?}")]
    AmbiguousMembership {
        count: usize,
        /// (coefficient vector, residual) for the closest offenders.
        near_misses: Vec<(Vec<i64>, f64)>,
    },

    #[error("window cannot be certified: {0}")]
    WindowUncertifiable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("iteration stalled: {0}")]
    Stalled(String),

    #[error("unsupported in this dimension/mode: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
