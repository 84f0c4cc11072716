use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph needs at least {needed} vertices for k = {k}, got {n}")]
    TooFewVertices { n: usize, k: usize, needed: usize },

    #[error("vertices {i} and {j} share coordinates; inverse-square weights are undefined")]
    DuplicateCoordinates { i: usize, j: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("band width {k} must be smaller than the time dimension m = {m}")]
    BandTooWide { m: usize, k: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("thresholds must be non-decreasing; entry {index} decreases")]
    DecreasingThresholds { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conjugate gradient stalled at relative residual {residual:.3e} after {iters} iterations")]
    CgDidNotConverge { residual: f64, iters: usize },

    #[error("solver produced non-finite values at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("linear system is singular: {0}")]
    SingularSystem(String),

    #[error("sampling rate {0} is outside (0, 1]")]
    InvalidRate(f64),

    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown method '{0}'")]
    UnknownMethod(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
