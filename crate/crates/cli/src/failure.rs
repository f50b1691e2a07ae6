use std::fmt;

use minifunc::Error;

/// A failed run and its process exit code: 2 for bad input, 3 for a
/// configuration that fails validation, 4 for numerical failure.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn code_of(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NonFinite { .. }
        | Error::DerivativeOrder { .. }
        | Error::Csv(_)
        | Error::Io(_) => 2,
        Error::Config(_) | Error::Violations(_) => 3,
        Error::Numerical(_) | Error::Infeasible | Error::Unbounded | Error::Truncation { .. } => 4,
        Error::Rep { source, .. } => code_of(source),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: code_of(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::input(e.to_string())
    }
}
