use thiserror::Error;

/// Errors raised by the geometry engine and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {0:?} lies outside the chart domain")]
    OutOfDomain(Vec<f64>),
    #[error("metric is degenerate at {0:?}")]
    DegenerateMetric(Vec<f64>),
    #[error("plane is degenerate (|Gram determinant| = {0:e})")]
    DegeneratePlane(f64),
    #[error("tangent vector is based at a different point than the lift target")]
    BasePointMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fiber point has g(u,u) = {value}, expected {eps}")]
    NotOnSphereBundle { value: f64, eps: f64 },
    #[error("eps must be +1 or -1, got {0}")]
    InvalidEps(f64),
    #[error("T_eps M with eps = -1 needs a base of index >= 1")]
    EmptyFiber,
    #[error("could not complete a pseudo-orthonormal frame")]
    FrameConstructionFailure,
    #[error("no fiber coordinate can be solved from the constraint")]
    NoSolvableCoordinate,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
