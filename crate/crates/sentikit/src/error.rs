//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("bad encoding: {0}")]
    BadEncoding(String),

    #[error("missing column {0:?} in header")]
    MissingColumn(String),

    #[error("unknown label {value:?} at data row {row}")]
    UnknownLabel { row: usize, value: String },

    #[error("empty review text at data row {row}")]
    EmptyText { row: usize },

    #[error("corpus contains no records")]
    EmptyCorpus,

    #[error("class {0} has no records")]
    EmptyClass(&'static str),

    #[error("k={k} folds exceed the smallest class count {min_count}")]
    FoldTooLarge { k: usize, min_count: usize },

    #[error("cannot build a vocabulary from an empty training set")]
    EmptyTrainingSet,

    #[error("document frequency must be at least 1")]
    ZeroDf,

    #[error("class {0} missing from the training set")]
    MissingClass(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} true labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty evaluation input")]
    EmptyEval,

    #[error("sequence has no real tokens")]
    EmptySequence,

    #[error("training set is empty")]
    EmptyTrainSet,

    #[error("cross-validation needs at least 2 folds, got {0}")]
    TooFewFolds(usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("bad model file: {0}")]
    ModelFormat(String),

    #[error(
        "model fingerprint mismatch: model was built against different pipeline data ({field})"
    )]
    FingerprintMismatch { field: String },
}

impl Error {
    /// Wraps an `io::Error` with the offending path, mapping the not-found
    /// case to the dedicated variant.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Error {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.display().to_string())
        } else {
            Error::Io {
                path: path.display().to_string(),
                source,
            }
        }
    }
}
