use std::path::PathBuf;

/// Failure of a command, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Design {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] smd_core::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for everything that fails
    /// while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(smd_core::Error::InvalidConfig(_) | smd_core::Error::InvalidRegion(_)) => 1,
            CliError::Core(smd_core::Error::InfeasibleRegion) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
