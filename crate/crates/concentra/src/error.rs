use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact enumeration would exceed the configured atom budget.
    #[error("enumeration of {needed} atoms exceeds budget {budget}; use mc mode or raise CONCENTRA_BUDGET")]
    Budget { needed: u128, budget: u128 },

    /// A verification routine found a violated inequality. Since every
    /// inequality we check is a theorem, this localizes an implementation bug.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for constructing a domain error.
pub fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
