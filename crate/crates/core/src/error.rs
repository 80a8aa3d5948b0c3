use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2 or 4)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A channel or measurement produced an output that fails validation.
    /// Points at a transcription bug in the operator tables, never at user input.
    #[error("internal consistency fault: {0}")]
    Consistency(String),

    #[error("index {index} out of range (max {max})")]
    BadIndex { index: usize, max: usize },

    #[error("no reference curve for {0}")]
    UnknownReference(String),

    #[error("objective returned a non-finite value at evaluation {0}")]
    NonFiniteObjective(usize),

    #[error("invalid optimization problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}
