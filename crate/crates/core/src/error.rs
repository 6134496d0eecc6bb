//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by filters, generators, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The recursion state has degenerated numerically (e.g. a gain
    /// denominator that should be positive is not).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// A filter state picked up a NaN or infinity; the run cannot continue.
    #[error("non-finite value in {what} (algorithm `{algorithm}`, iteration {iteration})")]
    NonFinite {
        what: &'static str,
        algorithm: String,
        iteration: usize,
    },

    /// Experiment configuration is inconsistent or incomplete.
    #[error("configuration error: {0}")]
    Config(String),

    /// A channel/config file failed to parse.
    #[error("parse error at {path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    /// Filesystem failure, annotated with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
