use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// `Clone` is deliberate: evaluation results (including failures) are
/// memoized and may be handed out more than once.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter or configuration value is outside its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation was called with arguments that violate its contract.
    #[error("invalid usage: {0}")]
    InvalidUsage(String),

    /// A protocol execution failed an internal consistency check.
    #[error("protocol failure: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
