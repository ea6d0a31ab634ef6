use std::fmt::Display;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] turnpike_core::Error),
}

impl CliError {
    /// Wraps an error met while building the value of configuration key `key`.
    pub fn config(key: &str, err: impl Display) -> Self {
        CliError::Config(format!("{key}: {err}"))
    }

    /// 2 for usage and configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}
