use std::fmt;

use maslov_core::MaslovError;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 2,
    Consistency = 3,
    Tolerance = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: ExitStatus) -> ExitStatus {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Validation,
            message: msg.into(),
        }
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Consistency,
            message: msg.into(),
        }
    }

    pub fn tolerance(msg: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Tolerance,
            message: msg.into(),
        }
    }

    pub fn context(mut self, ctx: impl fmt::Display) -> Self {
        self.message = format!("{ctx}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<MaslovError> for CliError {
    fn from(e: MaslovError) -> Self {
        let status = match e {
            MaslovError::ToleranceBreach { .. } => ExitStatus::Tolerance,
            MaslovError::Consistency(_) => ExitStatus::Consistency,
            _ => ExitStatus::Validation,
        };
        CliError {
            status,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(format!("io error: {e}"))
    }
}
