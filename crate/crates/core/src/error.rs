use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Messages are prefixed with the
/// module that raised them so aggregated pipeline errors stay traceable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("robust_stats: empty input")]
    EmptyInput,
    #[error("robust_stats: need at least two observations")]
    TooFewObservations,
    #[error("robust_stats: probability out of range: {0}")]
    ProbabilityOutOfRange(f64),
    #[error("data: non-finite value in column '{column}' at row {row}")]
    NonFinite { column: String, row: usize },
    #[error("data: {0}")]
    Data(String),
    #[error("covariance: zero-variance column '{0}'")]
    ZeroVariance(String),
    #[error("covariance: degenerate column '{0}'")]
    DegenerateColumn(String),
    #[error("covariance: nonpositive scale for column '{0}'")]
    NonPositiveScale(String),
    #[error("linalg: matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("linalg: not positive semi-definite (min eigenvalue {0:e})")]
    NotPositiveSemiDefinite(f64),
    #[error("linalg: dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(
        "regression: predictor covariance is singular or ill-conditioned (condition {0:e}); use ridge initial weights"
    )]
    IllConditioned(f64),
    #[error("regression: no admissible predictors")]
    NoAdmissiblePredictors,
    #[error("regression: degenerate predictor variance at index {0}")]
    DegeneratePredictor(usize),
    #[error("regression: {0}")]
    InvalidOption(String),
    #[error("simulation: {0}")]
    Simulation(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
