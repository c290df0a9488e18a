use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index set must be strictly increasing positive integers, got {0:?}")]
    InvalidIndexSet(Vec<usize>),

    #[error("partition must be weakly decreasing, got {0:?}")]
    InvalidPartition(Vec<usize>),

    #[error("element {element} lies outside [1, {bound}]")]
    OutOfRange { element: usize, bound: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shift counts sum to {total}, exceeding the cardinality {r}")]
    ShiftOverflow { total: usize, r: usize },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("interpolation stuck: {0}")]
    Stuck(String),

    #[error("infinite entries in a position that cannot be auto-satisfied: {0}")]
    InfinityPlacement(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no convergence after {restarts} restarts; best residual {best_residual:e}")]
    NonConvergence { restarts: usize, best_residual: f64 },

    #[error("invalid projection: {0}")]
    InvalidProjection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
