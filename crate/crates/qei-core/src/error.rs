use alloc::string::String;

/// Errors raised by the numerical core.
///
/// Variants fall in three families that the CLI maps onto exit codes:
/// invalid input ([`Error::InvalidInput`], [`Error::ModeOutOfRange`], ...),
/// numerical certification failures ([`Error::Quadrature`],
/// [`Error::Integrator`], [`Error::Truncation`], ...) and bug signals
/// ([`Error::Inconsistent`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mode index {index} out of range for catalog with {count} modes")]
    ModeOutOfRange { index: usize, count: usize },

    #[error("position x = {x} is not a grid point of the numeric catalog")]
    OffGrid { x: f64 },

    #[error("grid of {grid} points cannot resolve {modes} modes (need at least {required})")]
    UnderResolved { grid: usize, modes: usize, required: usize },

    #[error("eigen-residual {worst:e} exceeds tolerance {tolerance:e}")]
    EigenResidual { worst: f64, tolerance: f64 },

    #[error("Fock dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("quadrature not certified: step-halving disagreement {disagreement:e} > {tolerance:e}")]
    Quadrature { disagreement: f64, tolerance: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("truncation proxy {proxy:e} exceeds limit {limit:e}")]
    Truncation { proxy: f64, limit: f64 },

    #[error("finite-difference step underflow (h = {step:e})")]
    StepUnderflow { step: f64 },

    #[error("mismatched catalogs or truncations: {0}")]
    Mismatch(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    /// True for failures of a numerical certificate (as opposed to bad input).
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Integrator(_)
                | Error::Truncation { .. }
                | Error::StepUnderflow { .. }
                | Error::EigenResidual { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
