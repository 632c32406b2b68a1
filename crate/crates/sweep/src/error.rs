use std::path::PathBuf;

use thiserror::Error;

/// Failures of a sweep run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot {action} {}: {source}", path.display())]
    Io {
        action: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{unconverged} of {total} rows did not converge under truncation doubling")]
    Convergence { unconverged: usize, total: usize },
    #[error(transparent)]
    Numerics(#[from] angular_qudit::Error),
}

impl SweepError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io { .. } => 3,
            Self::Convergence { .. } => 4,
            Self::Numerics(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, SweepError>;
