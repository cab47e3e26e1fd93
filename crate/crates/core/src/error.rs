use thiserror::Error;

/// Errors raised by the measurement library.
///
/// Display strings lead with the variant name so that command-line callers
/// can report which invariant was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmError {
    #[error("NonSquare: expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("NumericalFailure: {0}")]
    NumericalFailure(String),

    #[error("Overflow: dimension {dim} exceeds the cap of {cap}")]
    Overflow { dim: usize, cap: usize },

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("RankDeficient: smallest singular value {sigma_min:e} is below {tol:e}")]
    RankDeficient { sigma_min: f64, tol: f64 },

    #[error("InvalidPermutation: {0}")]
    InvalidPermutation(String),

    #[error("InvalidMatrix: {0}")]
    InvalidMatrix(String),

    #[error("NotNormalized: column {column} has norm {norm}")]
    NotNormalized { column: usize, norm: f64 },

    #[error("LinearlyDependent: smallest singular value {sigma_min:e} is below {tol:e}")]
    LinearlyDependent { sigma_min: f64, tol: f64 },

    #[error("BadPriors: {0}")]
    BadPriors(String),

    #[error("NotSquare: {count} state vectors of dimension {dim}")]
    NotSquare { count: usize, dim: usize },

    #[error("ThetaOutOfRange: theta = {0} is outside (0, pi/2]")]
    ThetaOutOfRange(f64),

    #[error("NonUniformPriors: unambiguous discrimination requires equiprobable signals")]
    NonUniformPriors,

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QmError>;
