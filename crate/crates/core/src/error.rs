use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite samples")]
    NonFinite,

    #[error("grid mismatch between operands")]
    ShapeMismatch,

    #[error("one-form is not closed: curl residual {residual:.3e} exceeds {tol:.3e}")]
    NotClosed { residual: f64, tol: f64 },

    #[error("direct quadrature limited to n <= 64 (got n = {n})")]
    DirectQuadratureTooLarge { n: usize },

    #[error("input has zero L2 norm")]
    ZeroInput,

    #[error("invalid Beltrami coefficient: {0}")]
    InvalidBeltrami(String),

    #[error("no convergence after {max_iter} iterations (residual {residual:.3e})")]
    NoConvergence { max_iter: usize, residual: f64 },

    #[error("eta must vanish on the boundary ring")]
    InvalidEta,

    #[error("non-positive Jacobian (min {min:.3e})")]
    NonPositiveJacobian { min: f64 },

    #[error("degenerate normalization: map takes equal values at 0 and 1")]
    DegenerateNormalization,

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("point {0} lies outside the grid")]
    PointOutsideGrid(String),

    #[error("precondition residual {residual:.3e} exceeds {tol:.3e}")]
    PreconditionResidualTooLarge { residual: f64, tol: f64 },

    #[error("ball of radius {radius} does not fit inside the grid")]
    BallOutsideGrid { radius: f64 },

    #[error("|d_z Phi| below floor at {count} samples")]
    DegenerateDerivative { count: usize },

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
