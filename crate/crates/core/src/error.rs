use thiserror::Error;

/// Errors raised by the analytic and simulation code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Transmitter and receiver (or two nodes) occupy the same point; the
    /// free-space model is singular at r = 0.
    #[error("coincident positions: {0}")]
    CoincidentPoints(&'static str),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A BER target the modulation cannot reach at any SINR.
    #[error("BER target {target} is unattainable; the curve saturates at {ceiling}")]
    Unattainable { target: f64, ceiling: f64 },

    #[error("symbol {symbol} out of range for M = {m}")]
    SymbolOutOfRange { symbol: usize, m: usize },

    #[error("degenerate extent: {0}")]
    DegenerateExtent(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
