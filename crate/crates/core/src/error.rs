use thiserror::Error;

/// Errors raised by model construction, sampling, analysis and verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An operation was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A path, tree or graph failed structural validation.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The lazily generated simulation window would exceed its hard cap.
    #[error("simulation window cap exceeded: {0}")]
    WindowCap(String),

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn pre(reason: impl Into<String>) -> Self {
        Error::Precondition(reason.into())
    }

    pub(crate) fn malformed(reason: impl Into<String>) -> Self {
        Error::Malformed(reason.into())
    }
}
