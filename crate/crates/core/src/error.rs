use thiserror::Error;

/// Errors raised by the forecasting library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForecastError {
    #[error("series too short: {0}")]
    Length(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("value outside domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("grey model fit failed: {0}")]
    Fit(String),
    #[error("state partition failed: {0}")]
    Partition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl ForecastError {
    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            ForecastError::Length(_)
                | ForecastError::Shape(_)
                | ForecastError::Domain(_)
                | ForecastError::InvalidParameter(_)
                | ForecastError::Parse { .. }
                | ForecastError::Io(_)
        )
    }
}

impl From<std::io::Error> for ForecastError {
    fn from(e: std::io::Error) -> Self {
        ForecastError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ForecastError>;
