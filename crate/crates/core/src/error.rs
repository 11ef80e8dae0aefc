use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("exponent {exponent} is not a multiple of 1/{denom}: session denominator too small")]
    DenominatorTooSmall { exponent: String, denom: u32 },

    #[error("pole at hbar = {hbar}: denominator factor {factor} vanishes")]
    Pole { factor: String, hbar: String },

    /// Indices in `pair` are 1-based.
    #[error("matrix is not symmetrizable: {reason} (violating pair {}, {}; cycle {cycle:?})", pair.0, pair.1)]
    NotSymmetrizable {
        pair: (usize, usize),
        cycle: Vec<usize>,
        reason: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("total degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("block at total degree {needed} needs truncation depth {needed}, have {depth}")]
    DepthExceeded { needed: usize, depth: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("path comes within {distance:.3e} of a diagonal at t = {t:.6} (safety radius {radius:.1e})")]
    NearDiagonal { t: f64, distance: f64, radius: f64 },

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Name of the subsystem an error originates from, used in diagnostics.
    pub fn origin(&self) -> &'static str {
        match self {
            Error::DivisionByZero | Error::DenominatorTooSmall { .. } | Error::Pole { .. } => {
                "scalars"
            }
            Error::NotSymmetrizable { .. } | Error::Dimension(_) => "cartan",
            Error::NotApplicable(_) => "qpairing",
            Error::DegreeCap { .. } => "freealg",
            Error::DepthExceeded { .. } => "modules",
            Error::Internal(_) => "internal",
            Error::NearDiagonal { .. } | Error::Integration(_) => "kz",
        }
    }

    /// Whether the failure is a resource limit rather than bad input or a failed check.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::DegreeCap { .. } | Error::DepthExceeded { .. })
    }
}
