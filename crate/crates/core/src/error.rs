use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no sign change of {what} on [{lo}, {hi}] (values {f_lo:.6e}, {f_hi:.6e})")]
    Bracketing {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{what} is not monotone in beta near {beta} ({detail})")]
    NonMonotone {
        what: &'static str,
        beta: f64,
        detail: String,
    },

    #[error("tree would have more than {limit} nodes")]
    TreeTooLarge { limit: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
