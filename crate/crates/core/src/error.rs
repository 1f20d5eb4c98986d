use thiserror::Error;

/// Errors produced by the estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlopeError {
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("numerical failure at iteration {iteration}: {reason}")]
    NumericalFailure { iteration: usize, reason: String },

    #[error("rank-deficient design: columns {columns:?} are linearly dependent on earlier ones")]
    RankDeficient { columns: Vec<usize> },

    #[error("sequence construction failed at index {index}: {reason}")]
    Construction { index: usize, reason: String },

    #[error("degenerate fit: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, SlopeError>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(SlopeError::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

pub(crate) fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(SlopeError::NonFinite { what, index }),
        None => Ok(()),
    }
}
