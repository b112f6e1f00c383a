use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("dataset has no data rows")]
    EmptyFile,

    #[error("dataset needs at least one feature column and a label column, found {0} column(s)")]
    TooFewColumns(usize),

    #[error("line {line}: empty cell in column `{column}`")]
    MissingValue { line: u64, column: String },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("dataset shape mismatch: {0}")]
    Shape(String),

    #[error("feature index {index} out of range for {n_features} features")]
    FeatureOutOfRange { index: usize, n_features: usize },

    #[error("sample size {size} outside 1..={available}")]
    SizeOutOfRange { size: usize, available: usize },

    #[error("rows have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("{function} needs dimension >= {required}, got {dimension}")]
    DimensionTooSmall {
        function: &'static str,
        required: usize,
        dimension: usize,
    },

    #[error("{function} does not support categorical range {range}")]
    RangeUnsupported { function: &'static str, range: u32 },

    #[error("universe of {size} rows exceeds the enumeration cap of {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("every feature was flagged by the relevance sentinels; nothing left to score")]
    NoScorableFeature,

    #[error("no feature with a nonzero score survived selection")]
    EmptySelection,
}
