use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the domain of an operation (bad projection,
    /// ellipticity out of range, inconsistent level scheme, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A numerical routine failed (integrator step-size collapse, LAPACK
    /// failure, violated internal invariant).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Linalg(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
