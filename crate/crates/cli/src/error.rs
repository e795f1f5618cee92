use std::fmt;

use mgnn_core::{DataError, GraphError, HarnessError, NnError};

/// Failure classes, one per non-zero exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values (exit 1).
    Usage(String),
    /// Unreadable, unwritable or malformed inputs (exit 2).
    Data(String),
    /// A check ran and failed (exit 3).
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => CliError::Usage(format!("--config: {m}")),
            other => CliError::Data(other.to_string()),
        }
    }
}

/// Attaches the file a graph error came from.
pub fn graph_err(path: &std::path::Path) -> impl FnOnce(GraphError) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}
