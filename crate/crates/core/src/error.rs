use thiserror::Error;

use crate::geometry::RatPoint;

#[derive(Debug, Error)]
pub enum Error {
    #[error("source points are collinear, no affine correspondence exists")]
    DegenerateSource,

    #[error("matrix is singular and cannot be inverted")]
    SingularMatrix,

    #[error("polygon is degenerate: {0}")]
    DegeneratePolygon(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("document does not match the map schema: {0}")]
    SchemaError(String),

    #[error("map invariant violated: {0}")]
    InvariantViolation(String),

    #[error("requested depth {requested} exceeds the cap {cap}")]
    DepthCapExceeded { requested: usize, cap: usize },

    #[error("candidate grid is empty for the given mesh")]
    EmptyCandidateSet,

    #[error("cover verification failed: candidate ({candidate}) has covering gap {gap}")]
    CoverageFailure { candidate: RatPoint, gap: f64 },

    #[error("orbit truncated at step {step} before reaching the requested depth")]
    OrbitTruncated { step: usize },

    #[error("piece image leaves the domain: {0}")]
    ContainmentFailure(String),

    #[error("post-hoc certificate failed: {0}")]
    CertificateFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
