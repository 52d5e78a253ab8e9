use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameter violation: {}", .0.join("; "))]
    Parameters(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed trailer: {0}")]
    MalformedTrailer(String),

    #[error("inconsistent channel output: {0}")]
    Inconsistent(String),

    #[error("unrecoverable: no candidate matches the block sketches")]
    Unrecoverable,

    #[error("ambiguous: {0} distinct candidates match the block sketches")]
    Ambiguous(usize),

    #[error("malformed container: {0}")]
    Container(String),

    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
