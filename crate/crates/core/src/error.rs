use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: validation errors (malformed or
/// out-of-contract input) and mathematical errors (pole evaluation,
/// division by zero and similar). [`Error::is_mathematical`] tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroDivision,
    #[error("not a unit imaginary quaternion (|v| = {norm})")]
    NotUnitImaginary { norm: f64 },
    #[error("imaginary units are not orthogonal (inner product {inner})")]
    NonOrthogonal { inner: f64 },
    #[error("series centers differ ({left} vs {right})")]
    CenterMismatch { left: f64, right: f64 },
    #[error("|q - center| = {distance} exceeds the radius bound {radius}")]
    Divergence { distance: f64, radius: f64 },
    #[error("operation requires a slice preserving function")]
    NotSlicePreserving,
    #[error("operation requires an exact polynomial")]
    NotPolynomial,
    #[error("sample point does not lie on the slice")]
    NotOnSlice,
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("divisor has negative multiplicity {mult} at [{x} + {y}S]")]
    NegativeDivisor { x: f64, y: f64, mult: i64 },
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("exponent budget exceeded: cost {cost} > cap {cap}")]
    BudgetExceeded { cost: u64, cap: u64 },
    #[error("evaluation at a pole")]
    PoleEvaluation,
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("polynomial degree {degree} exceeds the expansion cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("verification failed: {0}")]
    VerificationFailure(String),
}

impl Error {
    /// True for errors that come from the mathematics (poles, zero division)
    /// rather than from malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::ZeroDivision
                | Error::Divergence { .. }
                | Error::ZeroFunction
                | Error::ZeroDenominator
                | Error::PoleEvaluation
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
