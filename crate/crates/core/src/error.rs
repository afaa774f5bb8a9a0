use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the allocation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration field violates its invariant.
    InvalidConfig {
        field: &'static str,
        reason: &'static str,
    },
    NonPositiveDistance(f64),
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A gain in a channel tensor is zero, negative or not finite.
    InvalidGain {
        index: usize,
        value: f64,
    },
    /// A per-cell map is not a bijection on the sub-channels.
    NotABijection {
        cell: usize,
    },
    NonFiniteCost {
        row: usize,
        col: usize,
    },
    MatrixTooLarge {
        size: usize,
        limit: usize,
    },
    EnumerationTooLarge {
        size: usize,
        cap: usize,
    },
    /// The high-SINR approximation needs strictly positive powers and gains.
    ApproximationUndefined,
    EmptySnrGrid,
    NoMethods,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig { field, reason } => {
                write!(f, "invalid config field `{field}`: {reason}")
            }
            Error::NonPositiveDistance(d) => write!(f, "distance must be positive, got {d}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected {expected}, found {found}"),
            Error::InvalidGain { index, value } => {
                write!(f, "gain #{index} must be positive and finite, got {value}")
            }
            Error::NotABijection { cell } => {
                write!(f, "assignment for cell {cell} is not a bijection")
            }
            Error::NonFiniteCost { row, col } => {
                write!(f, "cost matrix entry ({row}, {col}) is not finite")
            }
            Error::MatrixTooLarge { size, limit } => {
                write!(
                    f,
                    "{size}x{size} cost matrix exceeds the {limit}x{limit} limit"
                )
            }
            Error::EnumerationTooLarge { size, cap } => write!(
                f,
                "exhaustive search over {size} sub-channels exceeds the cap of {cap}"
            ),
            Error::ApproximationUndefined => {
                f.write_str("high-SINR approximation needs positive powers and gains")
            }
            Error::EmptySnrGrid => f.write_str("SNR grid is empty"),
            Error::NoMethods => f.write_str("no methods selected"),
        }
    }
}

impl core::error::Error for Error {}
