use thiserror::Error;

/// Errors raised by encoding, estimation and the reference oracles.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("row {row}, column `{column}`: {message}")]
    Encoding {
        row: usize,
        column: String,
        message: String,
    },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as {expected}")]
    Parse {
        row: usize,
        column: String,
        value: String,
        expected: &'static str,
    },
    #[error("{operation} refuses inputs longer than {limit} (got {len})")]
    SizeLimit {
        operation: &'static str,
        len: usize,
        limit: usize,
    },
    #[error("no band members to repair position {position} against")]
    UndefinedRepair { position: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("deadline exceeded")]
    Deadline,
}

pub type Result<T> = std::result::Result<T, Error>;
