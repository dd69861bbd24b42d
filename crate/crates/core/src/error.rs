use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need a < b and n >= 1")]
    InvalidInterval { a: f64, b: f64 },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("relative tolerance {0} must lie in (0, 1)")]
    InvalidTolerance(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("test function cannot be evaluated: {0}")]
    NotEvaluable(String),

    #[error("quadrature too coarse: integrand needs {required} nodes, {provided} configured")]
    QuadratureInsufficient { required: usize, provided: usize },

    #[error("weight support does not fit the basis domain: {0}")]
    SupportMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for a family of {len} functions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point {0} lies on or outside the unit disk")]
    OutsideDisk(String),

    #[error("exact arithmetic unavailable: {0}")]
    NotExact(String),

    #[error("evaluation point is too close to the weight support (distance {distance:e})")]
    NearSupport { distance: f64 },

    #[error("direction must be a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("reduced index set leaves no rows or columns")]
    EmptyReduction,

    #[error("operator product: {0}")]
    InvalidProduct(String),

    #[error("expansion budget exceeded: {cost} terms requested, cap {cap}")]
    BudgetExceeded { cost: u128, cap: u128 },

    #[error("numerical rank {rank} exceeds the allowed maximum {max}")]
    RankExceeds { rank: usize, max: usize },

    #[error("Hankel pencil ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Gram-Schmidt breakdown at member {index} (residual norm {residual:e})")]
    GramSchmidtBreakdown { index: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
