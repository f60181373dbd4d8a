//! Error type shared across the engine.

use std::fmt;

/// Everything that can go wrong, bucketed so callers (and the CLI exit-code
/// mapping) can tell misuse apart from mathematical failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller handed incompatible shapes, unknown names, bad arguments.
    Usage(String),
    /// Text input failed to parse; positions are 1-based.
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    /// A pair of maps fed to a subquotient does not compose to zero.
    NotAComplex(String),
    /// A model presentation contradicts itself (duplicate names, even-degree
    /// generators, differential rules of the wrong degree, ...).
    InconsistentPresentation(String),
    /// Input data is well-formed but fails a mathematical precondition
    /// (Maurer-Cartan violation, non-closed twist, failed validation).
    Validation(String),
    /// An identity the engine relies on failed; indicates a bug or corrupted
    /// input rather than ordinary misuse.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Usage(m) => write!(f, "usage error: {m}"),
            Error::Parse { line, col, message } => {
                write!(f, "parse error at line {line}, column {col}: {message}")
            }
            Error::NotAComplex(m) => write!(f, "not a complex: {m}"),
            Error::InconsistentPresentation(m) => write!(f, "inconsistent presentation: {m}"),
            Error::Validation(m) => write!(f, "validation failure: {m}"),
            Error::Internal(m) => write!(f, "internal consistency failure: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
