use thiserror::Error;

/// Errors raised by the laboratory's numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share a grid (or a block scheme) do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A random path could not be synthesized exactly.
    #[error("synthesis error: {0}")]
    Synthesis(String),

    /// No strategy is registered under the requested name.
    #[error("unknown {family} `{name}` (available: {available})")]
    UnknownStrategy {
        family: &'static str,
        name: String,
        available: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
