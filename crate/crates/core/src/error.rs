use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("series does not converge: {0}")]
    NonConvergence(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("weight not admissible: {0}")]
    Admissibility(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("line {line}, field `{field}`: {msg}")]
    Parse {
        line: usize,
        field: String,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
