use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not symmetric: max asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    Symmetry { asymmetry: f64, tolerance: f64 },

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param(_) | Error::Dimension(_) => 2,
            Error::Numeric(_)
            | Error::NotPsd { .. }
            | Error::Symmetry { .. }
            | Error::RankDeficient(_)
            | Error::Solver(_) => 3,
            Error::Format(_) | Error::Io(_) => 4,
        }
    }
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}

pub(crate) fn dim<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
