use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("non-finite input vector {0:?}")]
    NonFinite(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("{what} quadrature did not converge: achieved {achieved:e}, wanted {wanted:e}")]
    Quadrature {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },

    #[error("enumeration budget exceeded: {required} candidate points, cap is {cap}")]
    Budget { required: u64, cap: u64 },

    #[error("t = {t} is outside the spectrum coverage [0, {t_max}]")]
    Coverage { t: f64, t_max: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("spectrum file: {0}")]
    SpectrumFile(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::SpectrumFile(e.to_string())
    }
}
