use std::process::ExitCode;

use thiserror::Error;

/// Failure classes with fixed exit codes: configuration problems exit 1,
/// anything that goes wrong while running exits 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

impl From<smpctune_core::Error> for CliError {
    fn from(err: smpctune_core::Error) -> Self {
        match err {
            smpctune_core::Error::InvalidConfig(m) => CliError::Config(m),
            smpctune_core::Error::InvalidUsage(m) => CliError::Runtime(m),
            smpctune_core::Error::Protocol(m) => CliError::Runtime(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
