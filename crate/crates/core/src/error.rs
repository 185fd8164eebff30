use thiserror::Error;

/// Errors raised by the solver, its oracle, and the document layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("column {column} is not in J[{equation}]")]
    Selection { equation: usize, column: usize },

    #[error("equation {equation} has an empty index set")]
    EmptySelection { equation: usize },

    #[error("instance is infeasible")]
    Infeasible,

    #[error("size limit exceeded: {count} > {limit}")]
    Size { count: u128, limit: u128 },

    #[error("lambda fit failed: {0}")]
    Fit(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },
}

impl FreError {
    pub(crate) fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        FreError::Validation {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        FreError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FreError>;
