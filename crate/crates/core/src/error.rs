use thiserror::Error;

/// Errors raised by the design, signal and fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation of the unit-step basis at its pole `ω ≡ 0 (mod 2π)`.
    #[error("frequency {omega} lies on the pole of 1/(1 - e^-iω)")]
    Pole { omega: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty frequency grid")]
    EmptyGrid,

    #[error("no DFT bins survive a gap of half-width {half_width} at N = {n}")]
    EmptySpectrum { n: usize, half_width: f64 },

    /// The zero-frequency bin is nonzero, so the cumulative-sum cascade is undefined.
    #[error("DC bin is nonzero (|X_0| = {magnitude:e}); cascade has a pole at ω = 0")]
    NonzeroDc { magnitude: f64 },

    #[error("signal must be real-valued (max |Im| = {max_imag:e})")]
    ComplexSignal { max_imag: f64 },

    #[error("need at least {needed} regression rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("time {t} is outside the observation window [{start}, {end}]")]
    OutsideWindow { t: i64, start: i64, end: i64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
