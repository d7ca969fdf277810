use thiserror::Error;

/// Errors raised by the structured solver, the lower-triangular
/// decomposition and the dense reference routines.
///
/// Indices carried by the numerical variants are 1-based, matching the
/// row/step numbering used in diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed structured matrix (length mismatch, corners with `n < 3`, ...).
    #[error("structure error: {0}")]
    Structure(String),

    /// Malformed matrix or vector text.
    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },

    /// A pivot of an unpivoted recursion vanished.
    #[error("breakdown: zero pivot at step {index}")]
    Breakdown { index: usize },

    /// The bottom-right factor entry is zero, so the matrix is singular.
    #[error("singular (mu_n = 0)")]
    SingularMu,

    /// A triangular factor or a pivoted elimination has no usable pivot.
    #[error("singular: zero pivot in column {index}")]
    Singular { index: usize },

    /// A recurrence value left the range of `f64`.
    #[error("overflow: non-finite value at step {index}")]
    Overflow { index: usize },

    /// Operand dimensions do not fit the operation.
    #[error("shape error: {0}")]
    Shape(String),
}

impl Error {
    /// Short machine-friendly tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Structure(_) => "structure",
            Error::Parse { .. } => "parse",
            Error::Breakdown { .. } => "breakdown",
            Error::SingularMu | Error::Singular { .. } => "singular",
            Error::Overflow { .. } => "overflow",
            Error::Shape(_) => "shape",
        }
    }

    /// True for failures of the numerics rather than of the input layout.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Breakdown { .. }
                | Error::SingularMu
                | Error::Singular { .. }
                | Error::Overflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
