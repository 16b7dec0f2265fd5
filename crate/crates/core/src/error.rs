use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid array configuration: {0}")]
    InvalidArray(String),

    #[error("invalid polar point: {0}")]
    InvalidPoint(String),

    #[error("invalid sine interval [{min}, {max}]")]
    InvalidInterval { min: f64, max: f64 },

    #[error("dimension mismatch: expected {expected} elements, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("closed-form gain requires half-wavelength spacing (d/lambda = {ratio})")]
    SpacingNotHalfWavelength { ratio: f64 },

    #[error("wrong codebook kind: expected {expected}, found {found}")]
    WrongCodebookKind {
        expected: &'static str,
        found: String,
    },

    #[error("profile carries no signal (all powers zero)")]
    NoSignal,

    #[error("lookup table was built for a different array ({table}), requested {requested}")]
    FingerprintMismatch { table: String, requested: String },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("malformed table file: {0}")]
    TableFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
