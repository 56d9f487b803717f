use std::path::PathBuf;

use crate::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{op}: shape mismatch, expected {expected} but got {found}")]
    ShapeMismatch { op: &'static str, expected: String, found: String },

    #[error("{op}: {reason}")]
    InvalidArgument { op: &'static str, reason: String },

    #[error("cholesky: matrix is not positive definite at pivot {pivot} (value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("invalid distribution parameters: {0}")]
    InvalidDistribution(String),

    #[error("{}: bad magic 0x{found:08x}, expected 0x{expected:08x}", path.display())]
    BadMagic { path: PathBuf, expected: u32, found: u32 },

    #[error("{}: truncated file, header implies {expected} bytes but found {actual}", path.display())]
    Truncated { path: PathBuf, expected: usize, actual: usize },

    #[error("count mismatch: {images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("{}: bad record length, {len} bytes is not a multiple of {record}", path.display())]
    BadRecordLength { path: PathBuf, len: usize, record: usize },

    #[error("{}: record {index} has label {label}, expected a class in [0, 10)", path.display())]
    BadLabel { path: PathBuf, index: usize, label: u8 },

    #[error("class {class} has {available} examples but {requested} were requested")]
    InsufficientClass { class: usize, available: usize, requested: usize },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    pub(crate) fn shape(op: &'static str, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::ShapeMismatch { op, expected: expected.into(), found: found.into() }
    }

    pub(crate) fn invalid(op: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { op, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
