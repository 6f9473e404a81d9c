use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("evaluation error in {branch}: {detail}")]
    Evaluation { branch: &'static str, detail: String },

    /// The grid cannot resolve the requested field (aliasing or empty region).
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An internal consistency check failed.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A precondition of an operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Configuration or input text could not be parsed or validated.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
