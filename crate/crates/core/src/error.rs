use thiserror::Error;

use crate::field::FieldKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The sampled object has non-negligible probability density at the edge of the box.
    #[error("containment violated: boundary density {boundary:.3e} exceeds {limit:.3e}")]
    Containment { boundary: f64, limit: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("kernel is not Hermitian: residual {residual:.3e} exceeds {limit:.3e}")]
    NotHermitian { residual: f64, limit: f64 },

    #[error("grid mismatch")]
    GridMismatch,

    #[error("field kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: FieldKind,
        found: FieldKind,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
