use alloc::string::String;

/// Errors raised by the metric, corpus and experiment operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("entry without references")]
    EntryWithoutReferences,
    #[error("degenerate reference set")]
    DegenerateReferenceSet,
    #[error("zero entries")]
    ZeroEntries,
    #[error("duplicate entry id {0:?}")]
    DuplicateId(String),
    #[error("not a partial mode")]
    NotPartialMode,
    #[error("ratio {0} outside [0, 1]")]
    InvalidRatio(f64),
    #[error("sweep ratios must be strictly increasing")]
    RatiosNotIncreasing,
    #[error("sample size {requested} invalid for corpus of {available} entries")]
    InvalidSampleSize { requested: usize, available: usize },
    #[error("run count must be at least 1")]
    NoRuns,
    #[error("sequence of {len} tokens exceeds oracle limit {max}")]
    OracleInputTooLong { len: usize, max: usize },
    #[error("unknown entry id {0:?}")]
    UnknownEntry(String),
    #[error("entry has {available} references, {requested} requested")]
    InsufficientReferences { requested: usize, available: usize },
    #[error("corpus has {available} eligible distractors, {requested} requested")]
    InsufficientDistractors { requested: usize, available: usize },
    #[error("invalid bucket interval [{0}, {1})")]
    InvalidBucket(f64, f64),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
