use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown filter bank `{0}` (expected one of: haar, d4, crf137)")]
    UnknownBank(String),

    #[error("filter spec line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("filter bank `{bank}` failed validation: {condition}")]
    Validation { bank: String, condition: String },

    #[error("filter bank `{bank}` declares {which} = {declared} but the taps give {measured}")]
    MomentMismatch {
        bank: String,
        which: &'static str,
        declared: u32,
        measured: u32,
    },

    #[error("signal length {0} is not even and at least 2")]
    OddLength(usize),

    #[error("symmetric boundary requires odd-length symmetric filters; `{0}` does not qualify")]
    IncompatibleBoundary(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("length {len} is not divisible by 2^{levels}")]
    Divisibility { len: usize, levels: usize },

    #[error("malformed coefficients: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("selection asks for {requested} coefficients but only {total} exist")]
    SelectionOverflow { requested: usize, total: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("bad PGM data: {0}")]
    Pgm(String),

    #[error("bad coefficient dump: {0}")]
    Dump(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
