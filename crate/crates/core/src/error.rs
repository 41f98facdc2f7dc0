use crate::triple::Triple;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("triple {0} is not available")]
    NotAvailable(Triple),
    #[error("no available triples left (process terminated at step {0})")]
    Exhausted(usize),
    #[error("{what}: {size} exceeds the budget of {budget}")]
    TooLarge {
        what: &'static str,
        size: u128,
        budget: u128,
    },
    #[error("system is not complete: {0}")]
    Incomplete(String),
    #[error("resampling budget of {0} rounds exhausted")]
    BudgetExhausted(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported format version: {0}")]
    UnsupportedVersion(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
