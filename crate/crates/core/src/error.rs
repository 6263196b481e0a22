use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown filter `{name}`; supported filters: {supported}")]
    UnknownFilter { name: String, supported: String },

    #[error("filter `{filter}` violates invariant `{invariant}` (deviation {deviation:e})")]
    FilterInvariant {
        filter: String,
        invariant: &'static str,
        deviation: f64,
    },

    #[error("signal length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("coarsest level {j0} out of range for a signal with {levels} levels")]
    LevelOutOfRange { j0: usize, levels: usize },

    #[error("malformed coefficient tree: {0}")]
    MalformedTree(String),

    #[error("dense transform matrix requested for n = {n}, above the cap of {cap}")]
    MatrixTooLarge { n: usize, cap: usize },

    #[error("noise covariance is not constant within level {level} (deviation {deviation:e})")]
    NoiseCovariance { level: usize, deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("numerical failure at sweep {sweep} while updating {parameter}: {detail}")]
    Numerical {
        sweep: usize,
        parameter: String,
        detail: String,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
