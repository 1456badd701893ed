//! Error type shared across the library.

use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnError {
    /// Denominator whose value part is the zero polynomial.
    ZeroDenominator,
    /// Order of the identically-zero function requested.
    UndefinedOrder,
    /// Tensor weights incompatible with the requested operation.
    WeightMismatch { expected: i64, got: i64 },
    /// A basis expansion left a nonzero residual inside the given window.
    WindowTooSmall,
    /// gl(n) ranks of two operands disagree.
    DimensionMismatch,
    /// A result was requested outside the guaranteed-exact window.
    TruncationOverflow,
    /// An operator expected to be a scalar multiple of the identity is not.
    NotScalar,
    /// Sugawara rescaling attempted at critical level (c + κ = 0).
    CriticalLevel,
    /// Level-detection probes disagreed.
    Inconsistent,
    /// A reported dimension did not stabilise under deepening.
    NotStabilized,
}

impl fmt::Display for KnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnError::ZeroDenominator => write!(f, "denominator is identically zero"),
            KnError::UndefinedOrder => write!(f, "order of the zero function is undefined"),
            KnError::WeightMismatch { expected, got } => {
                write!(f, "weight mismatch: expected {expected}, got {got}")
            }
            KnError::WindowTooSmall => write!(f, "expansion window too small: nonzero residual"),
            KnError::DimensionMismatch => write!(f, "gl(n) dimension mismatch"),
            KnError::TruncationOverflow => write!(f, "request outside the guaranteed-exact window"),
            KnError::NotScalar => write!(f, "operator is not a scalar on the exact window"),
            KnError::CriticalLevel => write!(f, "critical level: c + kappa = 0"),
            KnError::Inconsistent => write!(f, "probe values are inconsistent"),
            KnError::NotStabilized => write!(f, "dimension not stabilised under deepening"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KnError {}

pub type Result<T> = core::result::Result<T, KnError>;
