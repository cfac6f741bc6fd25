use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or distribution parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A single regeneration cycle ran longer than the configured cap.
    #[error("cycle exceeded {cap} steps without regenerating (check parameters, e.g. drift)")]
    CycleCap { cap: u64 },

    /// A numerical quantity is unavailable for this model (no closed form).
    #[error("{0} is not available for this model")]
    Unavailable(String),

    /// Input sizes or shapes do not match.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Failure while reading or writing a data file.
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the inputs, as opposed to failures at run time.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Shape(_) | Error::Unavailable(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
