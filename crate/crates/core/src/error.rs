use thiserror::Error;

use crate::augpool::OperationKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image has zero size ({height}x{width})")]
    EmptyImage { height: usize, width: usize },

    #[error("pixel buffer holds {actual} bytes, expected {expected} for {height}x{width}x3")]
    PixelBufferLength {
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },

    #[error("augmentation plan repeats operation {0:?}")]
    DuplicateOperation(OperationKind),

    #[error("operations per sample must lie in 1..={max}, got {got}")]
    OpsPerSample { got: usize, max: usize },

    #[error("strength magnitude {0} outside [0, 1]")]
    Strength(f64),

    #[error("degenerate strength distribution: gamma_max is zero")]
    DegenerateDistribution,

    #[error("response curve for op {op_index} is invalid: {reason}")]
    InvalidCurve { op_index: usize, reason: String },

    #[error("unaugmented validation accuracy is zero; response curves are undefined")]
    ZeroBaseAccuracy,

    #[error("invalid loss statistics: {0}")]
    InvalidStats(String),

    #[error("non-finite training loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss {
        loss: f64,
        epoch: usize,
        batch: usize,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("{path}: truncated or mis-sized file at byte offset {offset}: expected {expected} bytes, found {actual}")]
    Truncated {
        path: String,
        offset: u64,
        expected: u64,
        actual: u64,
    },

    #[error("bad magic bytes: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("invalid split: {0}")]
    Split(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("snapshot mismatch: {0}")]
    Snapshot(String),

    #[error("invalid statistics input: {0}")]
    Statistics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("png: {0}")]
    Png(String),
}
