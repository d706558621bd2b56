use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label {label} out of range for deck of size {n}")]
    LabelOutOfRange { label: u32, n: usize },

    #[error("transposition needs two distinct labels, got ({0}, {0})")]
    DegenerateTransposition(u32),

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("merge precondition violated: {0}")]
    MergePrecondition(String),

    #[error("{0:?} is not a sub-multiset of {1:?}")]
    NotSubpartition(Vec<u32>, Vec<u32>),

    #[error("deck size must be at least {min}, got {n}")]
    DeckTooSmall { n: usize, min: usize },

    #[error("inconsistent marking state: {0}")]
    InconsistentState(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("statistics: {0}")]
    Statistics(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
