use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The radar/impairment configuration violates a waveform constraint.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An input buffer or bit stream has the wrong length or shape.
    #[error("input length error: {0}")]
    InputLength(String),

    /// Array/frame dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Anchor-based calibration could not be formed.
    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl Error {
    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::InputLength(_) => "input-length",
            Error::Dimension(_) => "dimension",
            Error::Calibration(_) => "calibration",
        }
    }
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
