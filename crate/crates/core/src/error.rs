//! Error types shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (edge lists, cluster files, pair files).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The caller asked for something the API cannot do (bad flag
    /// combination, budget below one cluster, directed input to an
    /// undirected-only oracle, ...).
    #[error("{0}")]
    Usage(String),

    /// A binary graph cache or index file is corrupt or has the wrong magic.
    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
