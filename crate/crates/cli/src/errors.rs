//! Error-to-exit-code mapping: 0 success, 2 usage, 3 parse, 4 numeric, 5 io.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<sdci_core::Error> for CliError {
    fn from(e: sdci_core::Error) -> Self {
        match e {
            sdci_core::Error::Domain(m) | sdci_core::Error::Config(m) => CliError::Usage(m),
            sdci_core::Error::Input(m) => CliError::Parse(m),
            sdci_core::Error::Bracket(m) | sdci_core::Error::Numeric(m) => CliError::Numeric(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        let line = e
            .position()
            .map(|p| format!(" (line {})", p.line()))
            .unwrap_or_default();
        CliError::Parse(format!("{e}{line}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
