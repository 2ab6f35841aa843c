use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An exhaustive search would visit more nodes than the configured budget.
    #[error("search space of {needed} nodes exceeds budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    /// A desk-scale pattern search found nothing. This is an honest outcome,
    /// the density guarantees behind the constructions are asymptotic.
    #[error("pattern not found: {0}")]
    PatternNotFound(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A constructed witness failed re-verification against the system.
    #[error("certification failed: {0}")]
    Certification(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
