use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact evaluation: {size} > {cap}; use Monte-Carlo")]
    TooLarge { size: usize, cap: usize },

    #[error("LP solver failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
