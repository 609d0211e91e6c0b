use thiserror::Error;

/// Errors raised across the library. Every variant maps to a stable CLI and FFI code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("preference cycle for agent {agent}: {detail}")]
    Cycle { agent: String, detail: String },
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("not a weak ranking: {0}")]
    NotWeakRanking(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("set is not a basis")]
    NotABasis,
    #[error("no exchange bijection: {0}")]
    NoBijection(String),
    #[error("too large: {what} exceeds limit {limit}")]
    TooLarge { what: String, limit: usize },
    #[error("preferences are not strict: {0}")]
    NotStrict(String),
    #[error("preferences are not weak rankings: {0}")]
    NotWeak(String),
    #[error("unreachable: {0}")]
    Unreachable(String),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("inputs are not bases")]
    NotBases,
    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    /// Exit code used by the CLI: 2 for usage and validation problems, 3 for size caps.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooLarge { .. } => 3,
            Error::NotFound(_) => 1,
            _ => 2,
        }
    }

    /// Stable small integer used by the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::Cycle { .. } => 10,
            Error::UnknownObject(_) => 11,
            Error::NotWeakRanking(_) => 12,
            Error::Parse(_) => 13,
            Error::Validation(_) => 14,
            Error::NotABasis => 15,
            Error::NoBijection(_) => 16,
            Error::TooLarge { .. } => 17,
            Error::NotStrict(_) => 18,
            Error::NotWeak(_) => 19,
            Error::Unreachable(_) => 20,
            Error::NotACycle(_) => 21,
            Error::NotBases => 22,
            Error::NotFound(_) => 23,
        }
    }

    pub fn too_large(what: impl Into<String>, limit: usize) -> Self {
        Error::TooLarge { what: what.into(), limit }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
