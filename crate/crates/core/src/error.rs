use thiserror::Error;

/// Errors raised across the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input data: bad header, bad field, out-of-domain code.
    #[error("{0}")]
    Data(String),

    /// A field-level parse/validation failure located in a CSV file.
    #[error("{message}, row {row}, column {column}")]
    Field {
        row: usize,
        column: String,
        message: String,
    },

    /// Caller supplied arguments that violate an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Intercepts violate a1 > a2.
    #[error("intercepts violate ordering a1 > a2 (a1 = {a1}, a2 = {a2})")]
    ThresholdOrdering { a1: f64, a2: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Numerically singular system (information matrix or least-squares design).
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Coefficients diverged during fitting.
    #[error("complete separation detected: |{variable}| slope reached {value:.3} (limit 30)")]
    Separation { variable: String, value: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Model file does not follow the expected schema.
    #[error("model schema violation: {0}")]
    Schema(String),
}

impl Error {
    /// True for errors that stem from numerical trouble rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular(_) | Error::Separation { .. } | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
