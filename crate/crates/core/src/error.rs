use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, violated preconditions, or mismatched groups.
    #[error("usage error: {0}")]
    Usage(String),
    /// The request exceeds a configured capability bound (enumeration bound,
    /// brute-force size, summation budget).
    #[error("capability error: {0}")]
    Capability(String),
    /// A search ran out of its node budget before finishing.
    #[error("budget exhausted after {nodes} nodes (best so far: {best})")]
    Budget { nodes: u64, best: usize },
    /// A claimed property of a construction or result did not hold.
    #[error("claim check failed: {0}")]
    Claim(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code: 1 for a failed claim, 2 for usage, 3 for budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Claim(_) => 1,
            Error::Usage(_) | Error::Parse(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Capability(_) | Error::Budget { .. } => 3,
        }
    }
}
