use std::path::PathBuf;

/// Errors returned by every fallible operation in this crate.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A probability argument was outside `[0, 1]` or not finite.
    #[error("`{name}` must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    /// A privacy budget was negative, NaN, or infinite.
    #[error("`{name}` must be a finite, non-negative epsilon, got {value}")]
    InvalidEpsilon { name: &'static str, value: f64 },

    /// Any other argument that violates its documented range.
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The same identifier appeared twice in a list that must be distinct.
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),

    /// A mask, table, or index did not match the size of the universe.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The conditioning outcome has probability zero under every dataset.
    #[error("outcome {outcome} has zero probability under the dataset prior")]
    ZeroProbabilityOutcome { outcome: usize },

    /// An iterative search ran out of steps.
    #[error("numerical search did not converge: {0}")]
    NoConvergence(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config error: {0}")]
    Config(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
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
