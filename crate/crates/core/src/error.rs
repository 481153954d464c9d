use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A channel quantity that a formula divides by (or takes the log of) is zero.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("frontier grids do not match: {0}")]
    GridMismatch(String),

    #[error("region is not downward closed: {0}")]
    NotDownwardClosed(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
