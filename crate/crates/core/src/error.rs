use alloc::string::String;
use core::fmt;

/// Everything that can go wrong inside the engine.
///
/// Variants carrying a `String` name the offending locus, index or
/// matrix in human-readable form so callers can surface them verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A denominator factor `(1 - t^0)` was requested.
    ZeroDenominatorExponent,
    /// `geometric_range(lo, hi)` with `lo > hi` or `lo == 0`.
    EmptyRange { lo: u32, hi: u32 },
    /// A rational series did not divide out to a polynomial.
    NotPolynomial,
    /// Two vectors or a vector and a matrix of different ranks met.
    RankMismatch { expected: usize, found: usize },
    /// A matrix was not square, or had the wrong size for the group.
    BadMatrix(String),
    /// A group generator is not invertible over the integers.
    NotInvertible(String),
    /// Generated group exceeded the closure bound.
    NotClosed { bound: usize },
    /// A finite group element does not permute the weight multiset.
    NotInvariant(String),
    /// A finite group element does not preserve the standard dot product.
    InnerProductNotInvariant(String),
    /// A scenario needs at least one weight.
    EmptyDiagram,
    /// Weights with multiplicity zero are meaningless.
    ZeroMultiplicity(String),
    /// The fibre of an extra-term stratum is not closed under semistability.
    FiberNotClosed { locus: String, beta: String },
    /// The center quotient could not be validated and no override exists.
    NeedsOverride { locus: String },
    /// Blow-up centers of equal stage meet outside a single higher-stage point.
    UnsupportedStages(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroDenominatorExponent => write!(f, "denominator factor (1 - t^0) is not allowed"),
            Error::EmptyRange { lo, hi } => write!(f, "empty geometric range {lo}..={hi}"),
            Error::NotPolynomial => write!(f, "series is not a polynomial: division leaves a remainder"),
            Error::RankMismatch { expected, found } => {
                write!(f, "rank mismatch: expected {expected}, found {found}")
            }
            Error::BadMatrix(m) => write!(f, "malformed matrix: {m}"),
            Error::NotInvertible(m) => write!(f, "matrix {m} is not invertible over the integers"),
            Error::NotClosed { bound } => {
                write!(f, "group closure exceeded {bound} elements")
            }
            Error::NotInvariant(m) => write!(f, "matrix {m} does not permute the weights"),
            Error::InnerProductNotInvariant(m) => {
                write!(f, "matrix {m} does not preserve the dot product")
            }
            Error::EmptyDiagram => write!(f, "weight diagram is empty"),
            Error::ZeroMultiplicity(w) => write!(f, "weight {w} has multiplicity zero"),
            Error::FiberNotClosed { locus, beta } => write!(
                f,
                "locus {locus}: fibre over slice index {beta} is not closed, manual treatment needed"
            ),
            Error::NeedsOverride { locus } => write!(
                f,
                "locus {locus}: center quotient failed validation and no override is configured"
            ),
            Error::UnsupportedStages(m) => write!(f, "unsupported blow-up stage configuration: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
