use thiserror::Error;

/// Errors produced by the mining, encoding, training and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("duplicate project ids: {}", .0.join(", "))]
    DuplicateKey(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("stratification error: {0}")]
    Stratification(String),

    #[error("persistence error: {0}")]
    Persistence(String),

    #[error("incompatible feature dictionary, missing: {}", .0.join(", "))]
    Compatibility(Vec<String>),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("range error: {0}")]
    Range(String),
}

impl Error {
    /// Stable machine-readable code for the error category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Schema(_) => "schema",
            Error::DuplicateKey(_) => "duplicate_key",
            Error::Parse(_) => "parse",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Training(_) => "training",
            Error::Stratification(_) => "stratification",
            Error::Persistence(_) => "persistence",
            Error::Compatibility(_) => "compatibility",
            Error::Config(_) => "config",
            Error::Range(_) => "range",
        }
    }

    /// Process exit code: 2 for input/validation problems, 3 for
    /// training/evaluation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Training(_) | Error::Stratification(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
