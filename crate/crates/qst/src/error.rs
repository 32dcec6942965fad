//! Error categories of a run and their exit codes.

use std::fmt;

use serde_json::json;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration (exit 2).
    Config {
        path: Option<String>,
        message: String,
    },
    /// The physics failed to propagate or fit (exit 3).
    Numerical(String),
    /// Output could not be written (exit 4).
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable record printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        let (path, message) = match self {
            CliError::Config { path, message } => (path.clone(), message.clone()),
            CliError::Numerical(m) => (None, m.clone()),
            CliError::Io { path, message } => (Some(path.clone()), message.clone()),
        };
        json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "path": path,
                "message": message,
            }
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config {
                path: Some(p),
                message,
            } => write!(f, "config error at {p}: {message}"),
            CliError::Config {
                path: None,
                message,
            } => write!(f, "config error: {message}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io { path, message } => write!(f, "cannot write {path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qst_core::Error> for CliError {
    fn from(e: qst_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config {
                path: None,
                message: e.to_string(),
            }
        }
    }
}
