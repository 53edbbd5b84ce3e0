use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the library.
///
/// Variants are grouped by the subsystem that raises them so that a front
/// end can map them onto distinct exit codes (see [`Error::kind`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index {index} out of range (extent {extent})")]
    OutOfRange { index: usize, extent: usize },

    #[error("{}: bad magic number {found:#010x}, expected {expected:#010x}", path.display())]
    BadMagic { path: PathBuf, found: u32, expected: u32 },
    #[error("{}: truncated file ({detail})", path.display())]
    Truncated { path: PathBuf, detail: String },
    #[error("image/label count mismatch: {images} images, {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("{}: unsupported image format: {detail}", path.display())]
    UnsupportedImage { path: PathBuf, detail: String },
    #[error("inconsistent dataset: {0}")]
    InconsistentDataset(String),
    #[error("missing training examples for class {0}")]
    MissingClass(usize),

    #[error("model format: {0}")]
    ModelFormat(String),
    #[error("model checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("model {what} does not match regeneration from seed {seed}")]
    SeedMismatch { what: &'static str, seed: u64 },
    #[error("model file {}: {source}", path.display())]
    ModelIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used for exit codes and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Model,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidDimension(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::OutOfRange { .. } => ErrorKind::Usage,
            Error::BadMagic { .. }
            | Error::Truncated { .. }
            | Error::CountMismatch { .. }
            | Error::UnsupportedImage { .. }
            | Error::InconsistentDataset(_)
            | Error::MissingClass(_)
            | Error::Io { .. } => ErrorKind::Data,
            Error::ModelFormat(_) | Error::Checksum { .. } | Error::SeedMismatch { .. } | Error::ModelIo { .. } => {
                ErrorKind::Model
            }
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn model_io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::ModelIo {
            path: path.into(),
            source,
        }
    }
}
