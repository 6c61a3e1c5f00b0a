use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Model(#[from] ehrelay::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code: 1 validation, 2 I/O, 3 failed agreement check.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Model(_) => 1,
            Self::Io { .. } | Self::Csv(_) => 2,
            Self::CheckFailed(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
