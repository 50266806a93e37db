use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Unreadable or malformed configuration. Exit code 2.
    ConfigParse,
    /// Well-formed configuration describing an invalid device or experiment. Exit code 3.
    Validation,
    /// Singular, degenerate or non-converged computation. Exit code 4.
    Numerical,
    /// Failure writing artifacts. Exit code 1.
    Io,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), details: Vec::new() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::ConfigParse, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Numerical, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Io, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::ConfigParse => 2,
            ErrorKind::Validation => 3,
            ErrorKind::Numerical => 4,
            ErrorKind::Io => 1,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<photon_switch::Error> for CliError {
    fn from(e: photon_switch::Error) -> Self {
        use photon_switch::Error as E;
        let kind = match &e {
            E::InvalidParameter(_) | E::InvalidLayout(_) | E::IndexOutOfRange { .. } => ErrorKind::Validation,
            _ => ErrorKind::Numerical,
        };
        let details = match &e {
            E::InvalidLayout(issues) => issues.iter().map(ToString::to_string).collect(),
            _ => Vec::new(),
        };
        Self { kind, message: e.to_string(), details }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}
