use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Young function parameters: {0}")]
    InvalidYoung(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field is not projectable onto the constraint (zero trace modular)")]
    NotProjectable,

    #[error("bracket search failed: {0}")]
    BracketFailure(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("integrability condition near zero violated (local exponent {exponent:.3e})")]
    Cond1Violation { exponent: f64 },

    #[error("inner solver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
