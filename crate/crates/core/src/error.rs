use thiserror::Error;

/// Errors raised by the library.
///
/// Verification failures (a product outside `{0,1}`, a violated bound) are
/// reported as data, not as errors; the variants here are precondition
/// failures and malformed input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent")]
    SingularBasis,
    #[error("family does not span R^{0}")]
    NotSpanning(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("polytope is not 2-level")]
    NotTwoLevel,
    #[error("malformed slack matrix: {0}")]
    MalformedSlack(String),
    #[error("corrupt checkpoint: {0}")]
    CheckpointCorrupt(String),
    #[error("scalar product {value} outside {{0,1}}")]
    NotBinary { value: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("counterexample found: {0}")]
    CounterexampleFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
