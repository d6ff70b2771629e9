use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit block of length {len} is not a multiple of {group} bits per symbol")]
    Length { len: usize, group: usize },

    #[error("modulation order {0} is not a power of two >= 2")]
    Order(usize),

    #[error("transform size {0} is not a power of two")]
    Size(usize),

    #[error("expected a {expected}-domain block, got {found}-domain")]
    Domain {
        expected: &'static str,
        found: &'static str,
    },

    #[error("expected {expected} samples, got {found}")]
    SampleCount { expected: usize, found: usize },

    #[error("cyclic prefix length {cp_len} exceeds FFT size {fft_size}")]
    CpLength { cp_len: usize, fft_size: usize },

    #[error("cyclic prefix fraction {fraction} times FFT size {fft_size} is not an integer")]
    NonIntegerCp { fraction: String, fft_size: usize },

    #[error("bit blocks differ in length: {tx} vs {rx}")]
    LengthMismatch { tx: usize, rx: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the filesystem rather than by parameters.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv { .. })
    }
}
