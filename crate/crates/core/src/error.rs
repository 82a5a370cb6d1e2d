use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty reference set")]
    EmptyReferenceSet,
    #[error("insufficient reference points: need {needed}, have {available}")]
    InsufficientReferencePoints { needed: usize, available: usize },
    #[error("non-finite coordinate at index {index}")]
    NonFiniteLocation { index: usize },
    #[error("non-finite response at index {index}")]
    NonFiniteResponse { index: usize },
    #[error("duplicate locations at indices {first} and {second}")]
    DuplicateLocation { first: usize, second: usize },
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("negative distance {0}")]
    NegativeDistance(f64),
    #[error("not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("singular covariance")]
    SingularCovariance,
    #[error("singular neighbor covariance")]
    SingularNeighborCovariance,
    #[error("kriging predictions are required for {0:?} features")]
    MissingKrigingPredictions(crate::features::FeatureKind),
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),
    #[error("unknown layout tag `{0}`")]
    UnknownTag(String),
    #[error("dense simulation supports at most {cap} sites (requested {n}); use the sequential nearest-neighbor generator")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("max-stable truncation failure after {0} spectral functions")]
    MaxStableTruncation(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
