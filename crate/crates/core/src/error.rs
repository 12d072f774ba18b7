use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("singular metric at point {point}: |g_{axis}{axis}| = {value:e}")]
    SingularMetric { point: usize, axis: usize, value: f64 },
    #[error("metric violates (+,-,-,-) signature at point {point}")]
    Signature { point: usize },
    #[error("unsupported carrier: {0}")]
    UnsupportedCarrier(String),
    #[error("integration error: {0}")]
    Integration(String),
    #[error("accuracy error: estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Accuracy { estimate: f64, tolerance: f64 },
    #[error("inconsistent density: imaginary part {imag:e} vs real part {real:e}")]
    InconsistentDensity { imag: f64, real: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("instability detected at step {step}")]
    Instability { step: usize },
    #[error("degenerate field: every point is below the node threshold {0:e}")]
    DegenerateField(f64),
    #[error("boundary condition error: {0}")]
    Boundary(String),
    #[error("no convergence after {iterations} iterations: {reason}")]
    NonConvergence { iterations: usize, reason: String, trace: Vec<String> },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
