use std::fmt;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A PGM stream could not be decoded.
    #[error("pgm parse error at byte {offset}: {kind}")]
    Parse { offset: usize, kind: ParseErrorKind },

    /// A caller broke an operation's precondition (sizes, ranges, parity).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// More known error positions than observation rows.
    #[error("capacity exceeded: {support} unknowns but only {capacity} observations")]
    CapacityExceeded { support: usize, capacity: usize },

    /// The linear system is numerically rank deficient or the iteration lost feasibility.
    #[error("solver failure: {reason} (condition estimate {condition:.3e})")]
    Solver { reason: String, condition: f64 },

    /// Synthetic image generation could not satisfy its range constraint.
    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnsupportedMagic(String),
    BadHeaderToken(String),
    UnexpectedEof,
    MaxvalOutOfRange(u32),
    SampleOutOfRange(u32),
    ZeroDimension,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnsupportedMagic(m) => write!(f, "unsupported magic {m:?}"),
            ParseErrorKind::BadHeaderToken(t) => write!(f, "bad header token {t:?}"),
            ParseErrorKind::UnexpectedEof => f.write_str("truncated payload"),
            ParseErrorKind::MaxvalOutOfRange(v) => write!(f, "maxval {v} outside 1..=255"),
            ParseErrorKind::SampleOutOfRange(v) => write!(f, "sample {v} exceeds maxval"),
            ParseErrorKind::ZeroDimension => f.write_str("zero width or height"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
