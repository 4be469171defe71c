use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BevmError {
    /// A model parameter violates its invariants.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or unsuitable input data.
    #[error("input error: {0}")]
    Input(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numeric error: {message} (achieved {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    /// The point sits exactly on a branch boundary of a piecewise formula.
    #[error("point lies on a branch boundary: {0}")]
    Boundary(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl BevmError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        BevmError::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        BevmError::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        BevmError::Input(msg.into())
    }
}

impl From<std::io::Error> for BevmError {
    fn from(e: std::io::Error) -> Self {
        BevmError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, BevmError>;
