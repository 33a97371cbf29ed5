use std::io;

use thiserror::Error;

/// Structural errors raised while parsing one of the binary formats
/// (`FTNS` tensor files, `FCMB` streams, raw planar frames, side-info).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: Vec<u8> },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated {what}: needed {needed} bytes, {available} available")]
    Truncated {
        what: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    #[error("label is not valid UTF-8")]
    InvalidLabel,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0} trailing bytes after the last record")]
    TrailingBytes(usize),
}

impl FormatError {
    /// Stable machine-readable identifier of the error class.
    pub fn code(&self) -> &'static str {
        match self {
            FormatError::BadMagic { .. } => "bad-magic",
            FormatError::UnsupportedVersion(_) => "unsupported-version",
            FormatError::Truncated { .. } => "truncated",
            FormatError::DimensionOverflow(_) => "dimension-overflow",
            FormatError::InvalidLabel => "invalid-label",
            FormatError::NonFinite(_) => "non-finite",
            FormatError::Invariant(_) => "invariant",
            FormatError::TrailingBytes(_) => "trailing-bytes",
        }
    }
}

/// Errors raised by the inner frame codecs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("no codec registered for id {0}")]
    UnknownCodec(u8),
    #[error("bitstream exhausted while reading {0}")]
    Truncated(&'static str),
    #[error("corrupt payload: {0}")]
    Corrupt(String),
    #[error("sample {value} does not fit in {bit_depth} bits")]
    SampleRange { value: u32, bit_depth: u8 },
    #[error("external codec failed: {0}")]
    External(String),
}

/// Errors from LCR rank decoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LcrError {
    #[error("rank is not below C({n}, {k})")]
    RankOutOfRange { n: usize, k: usize },
    #[error("k = {k} exceeds N = {n}")]
    TooManyChannels { n: usize, k: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Lcr(#[from] LcrError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("unit {index}: {source}")]
    Unit {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Coarse classification used for exit codes and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Config,
    Io,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn in_unit(self, index: usize) -> Self {
        Error::Unit {
            index,
            source: Box::new(self),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Format(_) | Error::Codec(_) | Error::Lcr(_) => ErrorKind::Parse,
            Error::Domain(_) => ErrorKind::Domain,
            Error::Config(_) => ErrorKind::Config,
            Error::Unit { source, .. } => source.kind(),
            Error::Io(_) => ErrorKind::Io,
        }
    }

    /// Index of the failing unit, when the error came out of stream decoding.
    pub fn unit_index(&self) -> Option<usize> {
        match self {
            Error::Unit { index, .. } => Some(*index),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
