use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-absorbing chain: I - Q is singular")]
    NonAbsorbing,

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("ambiguous stationary state: the stationary vector is not unique")]
    AmbiguousStationary,

    #[error("degenerate equation: leading and linear coefficients are both zero")]
    DegenerateEquation,

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("ambiguous secondary success probability: candidate roots {roots:?}")]
    AmbiguousRoot { roots: [f64; 2] },

    #[error("under-sampled: {what} has {attempts} attempts, need at least {required}")]
    UnderSampled {
        what: &'static str,
        attempts: u64,
        required: u64,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("nothing to emit: row list is empty")]
    EmptyRows,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
