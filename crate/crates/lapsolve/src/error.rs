use std::fmt;

use lapsolve_core::Error as CoreError;

use crate::io::IoError;

/// Command failures, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags or parameters (exit 2).
    Input(String),
    /// The input was well formed but the computation could not finish:
    /// a degenerate graph or a numerical breakdown (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "input error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical error: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_) | CoreError::CapExceeded { .. } => {
                CliError::Input(e.to_string())
            }
            CoreError::Degenerate(_) | CoreError::Numerical(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
