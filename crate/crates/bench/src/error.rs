use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] hasimoto_core::Error),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for configuration and I/O problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        use hasimoto_core::Error as E;
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Core(E::Config(_) | E::GridMismatch { .. }) => 2,
            Self::Core(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
