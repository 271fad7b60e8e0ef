use std::fmt;
use std::io;

use pworlds_core::Error as CoreError;

/// A problem in an input file, located by line and, when known, column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub file: String,
    /// 1-based; 0 when the problem concerns the file as a whole.
    pub line: usize,
    pub column: Option<usize>,
    pub message: String,
}

impl FileError {
    pub fn new(file: &str, line: usize, message: impl Into<String>) -> Self {
        Self {
            file: file.to_string(),
            line,
            column: None,
            message: message.into(),
        }
    }

    pub fn at_column(mut self, column: usize) -> Self {
        self.column = Some(column);
        self
    }
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (0, _) => write!(f, "{}: {}", self.file, self.message),
            (l, Some(c)) => write!(f, "{}:{l}:{c}: {}", self.file, self.message),
            (l, None) => write!(f, "{}:{l}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for FileError {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    File(#[from] FileError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Usage(String),
    /// A check failed; the report has already been printed.
    #[error("{0}")]
    Failed(String),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const INVARIANT: i32 = 3;
    pub const INCONSISTENT: i32 = 4;
    pub const CAP_EXCEEDED: i32 = 5;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::File(_) | CliError::Io { .. } | CliError::Usage(_) => exit::INPUT,
            CliError::Failed(_) => exit::INVARIANT,
            CliError::Core(e) => match e {
                CoreError::InvalidDistribution(_) | CoreError::InvariantViolation(_) => {
                    exit::INVARIANT
                }
                CoreError::Inconsistent { .. } => exit::INCONSISTENT,
                CoreError::WorldSpaceTooLarge { .. } => exit::CAP_EXCEEDED,
                _ => exit::INPUT,
            },
        }
    }
}
