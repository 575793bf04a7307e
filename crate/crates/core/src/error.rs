use std::path::PathBuf;

use thiserror::Error;

use crate::pgm::PgmError;

/// Errors produced by the fusion pipeline, the metrics and the batch harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("PGM decode failed: {0}")]
    Pgm(#[from] PgmError),

    #[error("image dimensions differ: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("image must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("sample buffer holds {actual} values, expected {expected}")]
    BufferLength { expected: usize, actual: usize },

    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("seam column {seam} must lie strictly inside 0..{width}")]
    DegenerateSeam { seam: usize, width: usize },

    #[error("unknown fusion method `{0}` (expected moment, average or pca)")]
    UnknownMethod(String),

    #[error("no usable image pairs found")]
    EmptyBatch,

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

pub type Result<T, E = Error> = std::result::Result<T, E>;
