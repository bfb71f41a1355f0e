use thiserror::Error;

/// Errors raised by graph loading, simulation and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("switch state has {found} genes, graph has {expected} switches")]
    StateLength { expected: usize, found: usize },

    #[error("no assignment for switch `{0}`")]
    MissingSwitch(String),

    #[error("`{0}` is not a SWITCH node")]
    NotASwitch(String),

    #[error("no path from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{switches} switches exceed the exhaustive search cap of {cap}")]
    CapExceeded { switches: usize, cap: usize },

    #[error("measure sets cover different node universes")]
    UniverseMismatch,

    #[error("optimization cancelled")]
    Cancelled,
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by bad input rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Cancelled)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
