use std::io;
use std::path::PathBuf;

/// Process exit statuses. Each failure class has its own code.
pub mod exit {
    pub const OK: i32 = 0;
    pub const EVALUATION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const UNREADABLE_INPUT: i32 = 3;
    pub const ZERO_ENTRIES: i32 = 4;
    pub const OUTPUT: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] parroteval_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use parroteval_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Parse { .. } => exit::UNREADABLE_INPUT,
            CliError::Write { .. } => exit::OUTPUT,
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(E::ZeroEntries | E::EmptyCorpus) => exit::ZERO_ENTRIES,
            CliError::Core(_) => exit::EVALUATION,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
