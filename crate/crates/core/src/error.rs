use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample value at position {index} is not finite")]
    NonFinite { index: usize },

    #[error("sample is empty")]
    EmptySample,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cell coordinate {value} does not fit a 64-bit cell index")]
    CoordinateOverflow { value: f64 },

    #[error("clusterings cover different sample counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("distance between samples {i} and {j} failed: {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
