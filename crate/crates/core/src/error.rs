use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph too large for exact enumeration: {coins} independent edges (max {max})")]
    GraphTooLarge { coins: usize, max: usize },

    #[error("empty minibatch")]
    EmptyBatch,

    #[error("instance pool has no training instances")]
    EmptyPool,

    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit status: 1 usage/config, 3 checkpoint, 2 everything else
    /// (bad or missing data).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) => 1,
            Error::CheckpointMismatch(_) | Error::Checkpoint(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
