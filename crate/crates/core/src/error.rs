use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension N = {0} is not supported (need N >= 5)")]
    Dimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("point outside grid coverage: {0}")]
    OutsideCoverage(String),
    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },
    #[error("divergent moment: {0}")]
    Divergent(String),
    #[error("coincident bubble centers {0} and {1}")]
    Coincident(usize, usize),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("positivity violated: {0}")]
    Positivity(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("configuration rejected: {0}")]
    Rejected(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used as the CLI exit status.
    pub fn code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::InvalidParameter(_) | Error::Index(_) => 2,
            Error::Rejected(_) => 3,
            Error::EmptyGrid | Error::OutsideCoverage(_) => 4,
            Error::Quadrature { .. } | Error::Divergent(_) => 5,
            Error::Coincident(..) | Error::Singular(_) | Error::IllConditioned(_) => 6,
            Error::NonConvergence(_) => 7,
            Error::Positivity(_) => 8,
            Error::Io(_) | Error::Format(_) | Error::Json(_) => 9,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
