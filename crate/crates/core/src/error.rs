use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains non-finite entries")]
    NonFinite,
    #[error("iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("empty input to {0}")]
    Empty(&'static str),
    #[error("matrix has numerical rank 0")]
    ZeroMatrix,
    #[error("matrix is numerically singular")]
    Singular,
    #[error("columns are not orthonormal (deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },
    #[error("subspace already fills the ambient space")]
    FullSpace,
    #[error("index selection splits a numerically repeated eigenvalue at position {index} (gap {gap:.3e})")]
    DegenerateCut { index: usize, gap: f64 },
    #[error("eigen index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("division by zero at index {index}")]
    DivisionByZero { index: usize },
    #[error("negative input {value} at index {index}")]
    NegativeInput { index: usize, value: f64 },
    #[error("negative singular value {value} at index {index}")]
    NegativeSingularValue { index: usize, value: f64 },
    #[error("precondition of item {item} violated: {reason}")]
    PreconditionViolated { item: u8, reason: String },
    #[error("T is numerically singular")]
    SingularT,
    #[error("T is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("largest principal angle {theta1} is not below pi/2")]
    AnglesTooLarge { theta1: f64 },
    #[error("subspace is not invariant (residual {residual:.3e}, threshold {threshold:.3e})")]
    NotInvariant { residual: f64, threshold: f64 },
    #[error("subspace is not the top-k invariant subspace")]
    NotTopK,
    #[error("certificate does not match the instance: {0}")]
    InvalidCertificate(String),
    #[error("no separation: best separation constant is {delta:.3e}")]
    NoSeparation { delta: f64 },
    #[error("hypothesis {condition} failed: {reason}")]
    HypothesisFailed { condition: u8, reason: String },
    #[error("invalid instance spec: {0}")]
    SpecInvalid(String),
    #[error("invalid angle grid: {0}")]
    GridInvalid(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(op: &'static str, left: impl ToString, right: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        left: left.to_string(),
        right: right.to_string(),
    }
}
