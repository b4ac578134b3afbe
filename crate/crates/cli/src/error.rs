use std::fmt;

use stid_core::Error;

/// What went wrong, as far as the exit status is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Bad flags, config keys or values, or a model that does not fit the data.
    Config,
    /// Unreadable, malformed or too-short input files; output write failures.
    Data,
    /// Training or evaluation produced a non-finite number.
    Numeric,
}

impl Failure {
    pub fn exit_code(self) -> i32 {
        match self {
            Failure::Config => 1,
            Failure::Data => 2,
            Failure::Numeric => 3,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub failure: Failure,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Data,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.failure.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let failure = match e {
            Error::NonFinite(_) => Failure::Numeric,
            Error::ConfigMismatch { .. } | Error::InvalidArgument(_) => Failure::Config,
            Error::ShapeMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::EmptyInput(_)
            | Error::Parse { .. }
            | Error::SeriesTooShort { .. }
            | Error::CorruptFile { .. }
            | Error::Io { .. } => Failure::Data,
        };
        Self {
            failure,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reclassifies any library error from a data-loading step as a data error,
/// keeping non-finite values as numeric failures.
pub fn as_data_error(e: Error) -> CliError {
    let mut err = CliError::from(e);
    if err.failure == Failure::Config {
        err.failure = Failure::Data;
    }
    err
}
