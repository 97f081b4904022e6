use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the map domain (r = {r})")]
    OutsideDomain { r: f64 },

    #[error("point lies on the polar axis or at the pole")]
    OnAxis,

    #[error("analytic differential requested within {proximity:e} of a region boundary")]
    OnRegionBoundary { proximity: f64 },

    #[error("nonpositive Jacobian {value:e} at r = {r}, alpha = {alpha}")]
    NonpositiveJacobian { value: f64, r: f64, alpha: f64 },

    #[error("query point within guard distance of the image surface (margin {margin:e})")]
    GuardViolation { margin: f64 },

    #[error("winding number {winding} is not close to an integer; mesh too coarse")]
    MeshTooCoarse { winding: f64 },

    #[error("{failed} of {total} evaluations failed the degree guard")]
    TooManyGuardFailures { failed: usize, total: usize },

    #[error("line-crossing degree {crossing} disagrees with solid-angle degree {solid} at a check point")]
    DegreeMismatch { crossing: i64, solid: i64 },

    #[error("degenerate mesh: minimum angle {min_angle_deg:.3} degrees")]
    DegenerateMesh { min_angle_deg: f64 },

    #[error("cap too large: chordal diameter {diameter} exceeds {limit}")]
    CapTooLarge { diameter: f64, limit: f64 },

    #[error("stiffness matrix violates the M-matrix sign pattern")]
    NotMMatrix,

    #[error("linear solver stalled at relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
