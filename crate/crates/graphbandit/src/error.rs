//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text while parsing a graph or loss file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A value outside its documented domain.
    #[error("{0}")]
    Domain(String),

    /// An exact oracle was asked for more arms than its brute-force cap.
    #[error("{quantity} is computed by exhaustive search and capped at {cap} arms (got {arms}); supply the value explicitly")]
    Capacity {
        quantity: &'static str,
        cap: usize,
        arms: usize,
    },

    /// An operation was called before its preconditions held.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A runtime invariant failed mid-run; the affected run is aborted.
    #[error("invariant violated at round {round}: {msg}")]
    Invariant { round: u64, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
