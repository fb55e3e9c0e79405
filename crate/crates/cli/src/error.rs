use std::path::PathBuf;

use rotlab_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("numeric failure: {0}")]
    Numeric(CoreError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Write { .. } | CliError::Numeric(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidSpec(m) | CoreError::InvalidArgument(m) => CliError::Config(m.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
