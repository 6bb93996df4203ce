use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical engines and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of cells before meeting the tolerance.
    #[error(
        "tolerance not met after {cells} cells: estimate {estimate}, error bound {error_bound:.3e}"
    )]
    ToleranceNotMet {
        estimate: Complex64,
        error_bound: f64,
        cells: usize,
    },

    #[error("invalid integrand: non-finite sample at {at}")]
    InvalidIntegrand { at: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate point: x = 0 has no frequency split")]
    DegeneratePoint,

    #[error("empty region: the requested frequency region has no points")]
    EmptyRegion,

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("invalid ratio {0}: Cantor ratio must lie in (0, 1/2)")]
    InvalidRatio(f64),

    #[error("HLS exponent out of range: q*rho/2 = {product} must be below alpha = {alpha}")]
    HlsExponentOutOfRange { product: f64, alpha: f64 },

    #[error("out of theorem range: {0}")]
    OutOfTheoremRange(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("h_N is not monotone near tau = {0}")]
    NonMonotone(f64),

    #[error("phase mismatch: residual {0} exceeds 0.6")]
    PhaseMismatch(f64),

    #[error("x = {0} is not in the prefractal window C_k(r) ∩ (1/2, 1]")]
    NotInPrefractalWindow(f64),

    #[error("undersampled grid: {axis} has {have} points, needs at least {need}")]
    UndersampledGrid {
        axis: &'static str,
        have: usize,
        need: usize,
    },

    #[error("too many failed samples: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::InvalidIntegrand { .. } => "invalid_integrand",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::DegeneratePoint => "degenerate_point",
            Error::EmptyRegion => "empty_region",
            Error::DegenerateSupport(_) => "degenerate_support",
            Error::InvalidRatio(_) => "invalid_ratio",
            Error::HlsExponentOutOfRange { .. } => "hls_exponent_out_of_range",
            Error::OutOfTheoremRange(_) => "out_of_theorem_range",
            Error::OutOfRange(_) => "out_of_range",
            Error::NonMonotone(_) => "non_monotone",
            Error::PhaseMismatch(_) => "phase_mismatch",
            Error::NotInPrefractalWindow(_) => "not_in_prefractal_window",
            Error::UndersampledGrid { .. } => "undersampled_grid",
            Error::TooManyFailures { .. } => "too_many_failures",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
