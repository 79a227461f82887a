use std::process::ExitCode;

use thiserror::Error;

/// Failures mapped onto the process exit status: bad input exits with 2 and
/// names the flag at fault, everything else exits with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn invalid(field: &str, message: impl ToString) -> Self {
        Self::Invalid {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Invalid { .. } => ExitCode::from(2),
            Self::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl From<qdim_core::Error> for CliError {
    fn from(e: qdim_core::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags a core error as a validation failure of `field`.
pub trait Field<T> {
    fn field(self, name: &str) -> CliResult<T>;
}

impl<T> Field<T> for qdim_core::Result<T> {
    fn field(self, name: &str) -> CliResult<T> {
        self.map_err(|e| CliError::invalid(name, e))
    }
}
