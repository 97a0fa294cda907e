use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Empty value vector or dataset where at least one entry is needed.
    EmptyInput,
    /// Polynomial division by a (numerically) zero divisor.
    ZeroDivisor,
    /// Leading coefficient too small to normalize by.
    DegenerateLeading { leading: f64 },
    /// Chebyshev evaluation outside `[-1, 1]`.
    DomainViolation { x: f64 },
    /// Colleague construction needs a monic Chebyshev series.
    NotMonic { leading: f64 },
    /// Colleague construction needs degree at least two.
    DegreeTooSmall { degree: usize },
    /// Derivative used by a conditioning bound vanishes at the root.
    DegenerateDerivative { order: usize },
    /// An eigensolver exceeded its iteration budget.
    NoConvergence { iterations: usize },
    /// Schmeisser off-diagonal square `c_k` is negative beyond the clamp
    /// tolerance; the polynomial has roots off the real line.
    NegativeOffdiagonal { index: usize, value: f64 },
    /// Rejected projection of complex eigenvalues.
    ComplexRootsRejected { imag: f64 },
    /// Least-squares design matrix is numerically rank deficient.
    RankDeficient { rank: usize, basis: usize },
    /// Fewer sample points than basis functions.
    TooFewPoints { points: usize, basis: usize },
    /// A point lies outside the domain box.
    PointOutsideDomain { dim: usize, value: f64 },
    /// Domain box with `lo >= hi` in some dimension.
    InvalidDomain { dim: usize },
    /// A generator axis parameter is zero.
    ZeroAxis,
    /// Point or value dimensions disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Truth and approximation shapes disagree.
    ShapeMismatch,
    /// A parameter is outside its admissible range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input"),
            Error::ZeroDivisor => write!(f, "division by a zero polynomial"),
            Error::DegenerateLeading { leading } => {
                write!(f, "degenerate leading coefficient {leading:e}")
            }
            Error::DomainViolation { x } => write!(f, "evaluation point {x} outside [-1, 1]"),
            Error::NotMonic { leading } => {
                write!(f, "expected monic Chebyshev series, leading coefficient is {leading}")
            }
            Error::DegreeTooSmall { degree } => {
                write!(f, "degree {degree} too small for a colleague matrix")
            }
            Error::DegenerateDerivative { order } => {
                write!(f, "derivative of order {order} vanishes at the root")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "eigensolver did not converge after {iterations} iterations")
            }
            Error::NegativeOffdiagonal { index, value } => {
                write!(f, "negative Schmeisser off-diagonal c[{index}] = {value:e}")
            }
            Error::ComplexRootsRejected { imag } => {
                write!(f, "complex eigenvalue with imaginary part {imag:e} rejected")
            }
            Error::RankDeficient { rank, basis } => {
                write!(f, "design matrix rank {rank} below basis size {basis}")
            }
            Error::TooFewPoints { points, basis } => {
                write!(f, "{points} sample points for {basis} basis functions")
            }
            Error::PointOutsideDomain { dim, value } => {
                write!(f, "coordinate {value} in dimension {dim} outside the domain")
            }
            Error::InvalidDomain { dim } => write!(f, "empty interval in dimension {dim}"),
            Error::ZeroAxis => write!(f, "axis parameter must be nonzero"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ShapeMismatch => write!(f, "truth and approximation shapes differ"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
