use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid bandwidth {0}: must be positive (and at most the horizon for the convolution estimator)")]
    InvalidBandwidth(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} lies outside [0, {horizon}]")]
    Domain { t: f64, horizon: f64 },

    #[error("degenerate local linear window at t = {t}")]
    DegenerateWindow { t: f64 },

    #[error("at least 3 grid points are required, got {0}")]
    InsufficientGrid(usize),

    #[error("at least 2 replicate curves are required, got {0}")]
    InsufficientReplicates(usize),

    #[error("invalid confidence level parameter gamma = {0}: must lie in (0, 1)")]
    InvalidLevel(f64),

    #[error("trend and variance estimates are on different evaluation grids")]
    GridMismatch,

    #[error("covariance matrix is not positive definite even with jitter {jitter:e}")]
    NotPositiveDefinite { jitter: f64 },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("replication {index}: {source}")]
    Replication { index: usize, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerics (as opposed to rejected input).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::DegenerateWindow { .. } | Error::NotPositiveDefinite { .. } => true,
            Error::Replication { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
