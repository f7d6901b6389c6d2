//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point lies on the chart cut: {0}")]
    PointOnCut(String),
    #[error("point coincides with a cone vertex")]
    DegeneratePoint,
    #[error("grid is not uniform")]
    NonUniformGrid,
    #[error("quadrature did not reach the requested accuracy ({what}: estimated error {estimate:e})")]
    QuadratureFailure { what: String, estimate: f64 },
    #[error("function is not convex on the sampled interval")]
    NotConvex,
    #[error("time lies on a wavefront within the exclusion band")]
    OnFront,
    #[error("mode tail too large: last mode carries relative weight {0:e}")]
    ModeTailTooLarge(f64),
    #[error("query outside the tabulated grid: {0}")]
    OutOfGrid(String),
    #[error("root is tangent (|g'| = {0:e})")]
    TangentRoot(f64),
    #[error("no admissible moving-vertex frame for this configuration")]
    DegenerateFrame,
    #[error("angle difference is a genuine pole of the diffraction coefficient")]
    GeometricDirection,
    #[error("points coincide or the distance degenerates")]
    DegenerateDistance,
    #[error("no interior critical point in the localized region")]
    NoInteriorCriticalPoint,
    #[error("leg length must be positive")]
    BadLeg,
    #[error("spectrum truncated too early: damping at lambda_max is {0:e}")]
    IncompleteSpectrum(f64),
    #[error("fit window contaminated by length {0}")]
    WindowContaminated(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
