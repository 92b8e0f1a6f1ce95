use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is numerically singular near unknown {index} (growth {growth:.3e})")]
    Singular { index: usize, growth: f64 },

    #[error("eigensolver did not converge: {message}")]
    NotConverged { message: String, residuals: Vec<f64> },

    #[error("mesh parameter n = {n}: {source}")]
    AtMesh { n: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of the numerical solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::NotConverged { .. } => true,
            Error::AtMesh { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
