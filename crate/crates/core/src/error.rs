use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("index ({i}, {j}) outside {height}x{width} grid")]
    Index {
        i: usize,
        j: usize,
        height: usize,
        width: usize,
    },
    #[error("invalid basic rule {0}: expected a single power of two below 2^25")]
    InvalidBasic(u64),
    #[error("rule out of range [0, 33554431]: {0}")]
    OutOfRange(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("truncated payload: {0}")]
    Truncated(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
