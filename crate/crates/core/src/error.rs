use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Aut { line: usize, message: String },

    #[error("unknown state {0}")]
    UnknownState(usize),

    #[error("unknown action {0:?}")]
    UnknownAction(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("{kind} syntax error at {line}:{column}: {message}")]
    Syntax {
        kind: &'static str,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("formula is not monotonic: {0}")]
    NonMonotonic(String),

    #[error("unbound variable {0}")]
    UnboundVariable(String),

    #[error("approximant index {index} out of range 0..={max}")]
    ApproximantOutOfRange { index: usize, max: usize },

    #[error("not a least fixpoint formula")]
    NotLeastFixpoint,

    #[error("invalid pattern: {0}")]
    Pattern(String),

    #[error("strong formula needs {count} non-blocking actions, cap is {cap}")]
    SubsetCap { count: usize, cap: usize },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("invalid concurrency relation: {0}")]
    InvalidConcurrency(String),

    #[error("line {line}: {message}")]
    Property { line: usize, message: String },

    #[error("line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("search budget exhausted after {explored} signatures")]
    Budget { explored: usize },
}

impl Error {
    /// Resource guards map to a different exit status than input errors.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::SubsetCap { .. } | Error::Budget { .. })
    }
}
