use std::fmt;

use rmtlab_core::Error;

/// Failure of a run, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input; exit code 2.
    Usage(String),
    /// Error raised by the numerical core.
    Core(Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// Attaches the name of the offending key to a core error.
    pub fn key(key: &str, e: Error) -> Self {
        Self::Usage(format!("invalid value for '{key}': {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::RejectionStarved { .. }) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error: {msg}"),
            CliError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(format!("cannot write output: {e}"))
    }
}
