use thiserror::Error;

/// Which half of the quadratic feasibility test failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FeasibilityViolation {
    /// `sigma * |x0 - x*| > |g|`: the point is outside the reachable ball.
    OutsideBall,
    /// The angle between `g` and `x0 - x*` is not below `arccos(sigma d / |g|)`.
    AngleTooWide,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("operation supports dimension 2 only, got {0}")]
    UnsupportedDimension(usize),
    #[error("no quadratic with the requested data exists ({0:?})")]
    Infeasible(FeasibilityViolation),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("point is not in the inner region")]
    NotInInner,
    #[error("angle margin {margin:e} too small for a witness family")]
    InsufficientMargin { margin: f64 },
    #[error("region is empty for this instance")]
    RegionEmpty,
}

pub type Result<T> = std::result::Result<T, Error>;
