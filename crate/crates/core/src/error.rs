use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration needs {outcomes} joint outcomes, cap is {cap}")]
    CapExceeded { outcomes: u128, cap: u128 },

    #[error(
        "rate grid has {points} points, cap is {cap}; use the symmetric search or a coarser step"
    )]
    GridTooLarge { points: u128, cap: u128 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status the CLI reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } | Error::DimensionMismatch(_) | Error::Json { .. } => 2,
            Error::CapExceeded { .. } | Error::GridTooLarge { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}
