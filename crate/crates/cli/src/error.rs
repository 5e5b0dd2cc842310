use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad configuration, unreadable input.
    #[error("{0}")]
    Validation(String),
    /// A numerical routine failed on a valid configuration.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub(crate) fn at(field: &str, msg: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {msg}"))
    }
}

impl From<kthmax::Error> for CliError {
    fn from(e: kthmax::Error) -> Self {
        match e {
            kthmax::Error::Invalid(_) | kthmax::Error::MixtureMismatch(..) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
