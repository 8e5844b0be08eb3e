use std::path::PathBuf;

/// Errors produced by the clustering library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: cannot parse {cell:?} as a finite number")]
    Parse {
        row: usize,
        column: usize,
        cell: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset generation failed: {0}")]
    Generation(String),

    #[error("label length mismatch: predicted={predicted}, truth={truth}")]
    LabelLengthMismatch { predicted: usize, truth: usize },

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("malformed tree structure: {0}")]
    Structure(String),

    #[error("undefined input: {0}")]
    UndefinedInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
