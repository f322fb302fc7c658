use std::fmt;

use qmono::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse { origin: String, line: usize, column: usize, message: String },
    Invariant { origin: String, invariant: &'static str, detail: String },
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Invariant { .. } => EXIT_USAGE,
            CliError::Core(e) => match e {
                CoreError::BadShape(_)
                | CoreError::BadCut(_)
                | CoreError::BadSpec(_)
                | CoreError::IndexOutOfRange { .. }
                | CoreError::OutOfRange { .. }
                | CoreError::DimensionTooLarge { .. } => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse { origin, line, column, message } => {
                write!(f, "parse error: {origin}:{line}:{column}: {message}")
            }
            CliError::Invariant { origin, invariant, detail } => {
                write!(f, "InvariantViolation: {origin}: {invariant}: {detail}")
            }
            CliError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
