use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Array shapes or region descriptors do not match.
    #[error("shape error: {0}")]
    Shape(String),

    /// A grid function is in the wrong space (physical vs frequency).
    #[error("state error: expected {expected} space, found {found}")]
    State {
        expected: &'static str,
        found: &'static str,
    },

    /// The grid does not resolve the requested frequency content.
    #[error("resolution error: need |xi_k| up to {required:?}, grid reaches {available:?}")]
    Resolution {
        required: Vec<f64>,
        available: Vec<f64>,
    },

    /// A symbol produced a non-finite value.
    #[error("evaluation error: symbol is not finite at xi = {xi:?}")]
    Evaluation { xi: Vec<f64> },

    /// A hypothesis of an inequality is not satisfied.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Symbol expression or descriptor parse failure.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
