use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid experiment: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Input {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Seeding(#[from] adaptive_seeding::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
