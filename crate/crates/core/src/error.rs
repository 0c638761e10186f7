use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the design library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or matrix row has the wrong number of coordinates.
    DimensionMismatch { expected: usize, found: usize },
    /// Region description is malformed (bad bounds, non-finite entries, ...).
    InvalidRegion(String),
    /// The constraints describe an empty set.
    InfeasibleRegion,
    /// Iterative projection onto a polytope hit its cycle cap.
    ProjectionDidNotConverge { cycles: usize },
    /// Rejection sampling ran out of attempts; the region is too thin.
    RejectionBudgetExhausted { accepted: usize, attempts: usize },
    /// An operation needed at least one point but got none.
    EmptyPointSet,
    /// A slice that must be nonempty has no points.
    EmptySlice { slice: usize },
    /// A slice label is outside `0..k`.
    InvalidLabel { index: usize, label: usize, slices: usize },
    /// Requested sizes do not add up to the number of points available.
    SizeMismatch { expected: usize, found: usize },
    /// Two points (or a point and a reference point) coincide, so a closed
    /// form update would divide by zero.
    ZeroDistance { point: usize },
    /// Jitter repair could not separate coincident points.
    JitterBudgetExhausted { rounds: usize },
    /// Solver configuration violates its invariants.
    InvalidConfig(String),
    /// Analytic moments are only known for the standard simplex.
    AnalyticMomentsUnavailable,
    /// A scalar argument is out of its admissible range.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidRegion(msg) => write!(f, "invalid region: {msg}"),
            Error::InfeasibleRegion => f.write_str("region is empty"),
            Error::ProjectionDidNotConverge { cycles } => {
                write!(f, "projection did not converge after {cycles} cycles")
            }
            Error::RejectionBudgetExhausted { accepted, attempts } => write!(
                f,
                "rejection sampler accepted {accepted} points in {attempts} attempts; use hit-and-run"
            ),
            Error::EmptyPointSet => f.write_str("point set is empty"),
            Error::EmptySlice { slice } => write!(f, "slice {} is empty", slice + 1),
            Error::InvalidLabel {
                index,
                label,
                slices,
            } => write!(
                f,
                "point {index} has slice label {label}, expected a value below {slices}"
            ),
            Error::SizeMismatch { expected, found } => {
                write!(f, "size mismatch: expected {expected}, found {found}")
            }
            Error::ZeroDistance { point } => {
                write!(f, "point {point} coincides with another point")
            }
            Error::JitterBudgetExhausted { rounds } => {
                write!(f, "could not separate coincident points in {rounds} rounds")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid solver configuration: {msg}"),
            Error::AnalyticMomentsUnavailable => {
                f.write_str("analytic moments are only available for the standard simplex")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
