use std::fmt;
use std::process::ExitCode;

use qfisize::Error;

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input (exit 2).
    Usage(String),
    /// Numerical failure: truncation, non-convergence, failed fit (exit 3).
    Numeric(String),
    /// `--require-significant` and nothing significant (exit 4).
    NotSignificant(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::NotSignificant(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::NotSignificant(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Truncation { .. } | Error::NoConvergence { .. } | Error::Fit(_) | Error::NotHermitian { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
