use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("signal needs at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },
    #[error("sample interval must be positive and finite, got {0}")]
    InvalidSampleInterval(f64),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation undefined: both inputs are constant")]
    ConstantInputs,
    #[error("infinite SNR: noisy signal equals the clean signal")]
    InfiniteSnr,
    #[error("signal has zero power")]
    ZeroPower,
    #[error("structuring element width {width} exceeds signal length {len}")]
    SeWiderThanSignal { width: usize, len: usize },
    #[error("empty structuring element width range")]
    EmptyWidthRange,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),
    #[error("no echo found: best peak-to-median ratio {best_ratio:.3} below {threshold}")]
    NoEchoFound { best_ratio: f64, threshold: f64 },
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

impl Error {
    /// Stable machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TooShort { .. } => "E_TOO_SHORT",
            Error::InvalidSampleInterval(_) => "E_BAD_DT",
            Error::NonFinite(_) => "E_NON_FINITE",
            Error::LengthMismatch { .. } => "E_LENGTH_MISMATCH",
            Error::ConstantInputs => "E_CONSTANT_INPUTS",
            Error::InfiniteSnr => "E_INFINITE_SNR",
            Error::ZeroPower => "E_ZERO_POWER",
            Error::SeWiderThanSignal { .. } => "E_SE_TOO_WIDE",
            Error::EmptyWidthRange => "E_EMPTY_WIDTHS",
            Error::InvalidConfig(_) => "E_INVALID_CONFIG",
            Error::InvalidSpec(_) => "E_INVALID_SPEC",
            Error::NoEchoFound { .. } => "E_NO_ECHO",
            Error::Csv { .. } => "E_MALFORMED_CSV",
        }
    }
}
