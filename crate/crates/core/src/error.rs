use thiserror::Error;

/// Errors raised by the pricing, variance, objective and calibration layers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unattainable price {price} for {kind}: outside no-arbitrage band [{lower}, {upper}]")]
    UnattainablePrice {
        kind: &'static str,
        price: f64,
        lower: f64,
        upper: f64,
    },

    #[error("implied volatility did not converge for price {price} after {iterations} iterations")]
    IvNoConvergence { price: f64, iterations: usize },

    #[error("non-physical VIX: model VIX^2 = {0} at this maturity")]
    NonPhysicalVix(f64),

    #[error("jump size J = 0 makes lambda(J) singular")]
    SingularJump,

    #[error("no jump variance: target level {level} does not exceed sigma^2 = {sigma2}")]
    NoJumpVariance { level: f64, sigma2: f64 },

    #[error(
        "inconsistent VIX level {level} for sigma^2 = {sigma2}: implied intensity is negative"
    )]
    InconsistentVix { level: f64, sigma2: f64 },

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
