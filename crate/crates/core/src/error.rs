use std::path::PathBuf;

/// Errors raised across the crate.
///
/// Variants are grouped by the exit code the command-line front end maps
/// them to: configuration problems, data problems, and broken invariants.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("invalid sampling rate: {0}")]
    InvalidSamplingRate(f64),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("overlapping spans: [{0}, {1}) and [{2}, {3})")]
    OverlappingSpans(usize, usize, usize, usize),

    #[error("span out of range: [{start}, {end}) exceeds record length {len}")]
    SpanOutOfRange { start: usize, end: usize, len: usize },

    #[error("insufficient peaks: need at least 2, got {0}")]
    InsufficientPeaks(usize),

    #[error("undetectable window: need at least {needed} RR intervals, got {got}")]
    Undetectable { needed: usize, got: usize },

    #[error("signal too short: {0}")]
    SignalTooShort(String),

    #[error("unsupported model kind: {0}")]
    UnsupportedModelKind(String),

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u64, expected: u64 },

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("single-class training set")]
    SingleClass,

    #[error("class {class} has {count} members, fewer than k = {k}")]
    TooFewInClass { class: u8, count: usize, k: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("train/test overlap: record {0} appears in both")]
    TrainTestOverlap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Coarse error class; drives process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::Invariant(_) => ErrorClass::Internal,
            Error::Context { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
