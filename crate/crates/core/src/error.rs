use thiserror::Error;

/// Failures raised by the geometry, asymptotic and numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("position {x} lies outside [0, 1]")]
    OutOfDomain { x: f64 },

    #[error("invalid channel profile: {0}")]
    InvalidProfile(String),

    #[error("invalid wall function: {0}")]
    InvalidWall(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) within {subdivisions} subdivisions")]
    QuadratureFailure {
        tol: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("degenerate geometry: cross-section factor {value} must be positive")]
    DegenerateGeometry { value: f64 },

    #[error("root bracketing failed: {0}")]
    RootFindFailure(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("regular layer has w = {w} <= 0 at x = {x}")]
    NonpositiveW { x: f64, w: f64 },

    #[error("regular layer misses the right boundary-layer landing point by {mismatch:e}")]
    InconsistentRegularLayer { mismatch: f64 },

    #[error("logarithm argument vanishes in first integral {which}")]
    LogSingularity { which: &'static str },

    #[error("equilibrium with w = {w} is not hyperbolic")]
    NonHyperbolic { w: f64 },

    #[error("layer orbit diverged at xi = {xi}: |(u, v)| = {norm} exceeds 10x its initial value {initial}")]
    DivergentOrbit { xi: f64, norm: f64, initial: f64 },

    #[error("ODE integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("Newton did not converge at mu = {mu} (last scaled residual {residual:e}); try a finer continuation schedule")]
    NonConvergence { mu: f64, residual: f64 },

    #[error("solution is not converged")]
    NotConverged,

    #[error("singular linear system at row {row}")]
    SingularSystem { row: usize },

    #[error("time step rejected: {0}")]
    StepRejected(String),

    #[error("time step underflow: dt = {dt:e} at t = {t}")]
    StagnantStep { t: f64, dt: f64 },

    #[error("concentration {value} at node {node} is not positive")]
    NonpositiveConcentration { node: usize, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
