use crate::classical_dynamics::Trajectory;
use crate::interference::FringePattern;
use crate::Vec2;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("potential is singular at ({}, {})", .0.x, .0.y)]
    SingularPoint(Vec2),

    #[error("adaptive quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureFailure { estimate: f64, error_bound: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("gauge function is not single-valued: {0}")]
    MultivaluedGauge(String),

    #[error("trajectory hit a singular point at t = {t}")]
    SingularityHit { t: f64, partial: Box<Trajectory> },

    #[error("trajectory has no samples")]
    EmptyTrajectory,

    #[error("trajectory was integrated in a different field")]
    FieldMismatch,

    #[error("paths do not share endpoints (start gap {start_gap}, end gap {end_gap})")]
    EndpointMismatch { start_gap: f64, end_gap: f64 },

    #[error("kinetic momentum vanishes; wavelength undefined")]
    ZeroVelocity,

    #[error("geometry violation on {segment}: {reason}")]
    Geometry { segment: String, reason: String },

    #[error("patterns are sampled on different screen grids")]
    GridMismatch,

    #[error("pattern carries no fringes: {0}")]
    DegeneratePattern(String),

    #[error("barrier `{0}` lies outside the grid")]
    BarrierOutsideGrid(String),

    #[error("linear solve failed after {iterations} iterations (relative residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("screen probability did not saturate within {steps} steps")]
    Timeout { steps: usize, partial: Box<FringePattern> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
