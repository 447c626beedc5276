//! Error type of the command layer and its exit codes.

use std::fmt;
use std::process::ExitCode;

use mmmm_core::Error;

/// Why a command did not produce output.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or a violated precondition (exit code 2).
    Usage(String),
    /// The numerics gave up, e.g. the integrator ran out of steps (exit code 3).
    Numerical(String),
    /// Writing the output failed (exit code 1).
    Io(std::io::Error),
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure::Usage(message.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage error: {msg}"),
            Failure::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Failure::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::TruncationCap { .. } | Error::StepLimit { .. } => {
                Failure::Numerical(err.to_string())
            }
            _ => Failure::Usage(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Io(err)
    }
}

pub type CmdResult<T> = Result<T, Failure>;
