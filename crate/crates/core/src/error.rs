use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its legal range. `field` names the offending input.
    #[error("invalid {field}: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("offer list must contain one or two offers, got {0}")]
    OfferCount(usize),

    #[error("cost grid is empty")]
    EmptyGrid,

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("at {axis} = {value}: {source}")]
    Sweep {
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numeric machinery (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::EmptyGrid | Error::IndexOutOfRange { .. } => true,
            Error::Sweep { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
