use thiserror::Error;

/// Errors raised by the laboratory's numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("point is on the singular axis (x^2 + y^2 = {rho2:e})")]
    OnAxis { rho2: f64 },

    #[error("finite-difference stencil of width {h} crosses the singular axis")]
    StencilCrossesAxis { h: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },

    #[error("non-finite field sample at s = {s}")]
    NonFiniteSample { s: f64 },

    #[error("weight profile is not positive at t = {t} (value {value:e})")]
    NonPositiveProfile { t: f64, value: f64 },

    #[error("F(a) is not positive at t = {t} (value {value:e})")]
    NonPositiveF { t: f64, value: f64 },

    #[error("profile is not even: |a(t) - a(-t)| = {deviation:e} at t = {t}")]
    NotEven { t: f64, deviation: f64 },

    #[error("gate closed at t = {t}: 1 - a b = {gate}")]
    GateClosed { t: f64, gate: f64 },

    #[error("no iteration verdict after {k_max} steps (last step change {last_change:e})")]
    IterationBudgetExceeded { k_max: usize, last_change: f64 },

    #[error("mu = {mu} exceeds 1/8: no real root R")]
    NoRealRoot { mu: f64 },

    #[error("{clipped:e} of the squared norm falls outside the grid")]
    OutOfDomain { clipped: f64 },

    #[error("linear solver stalled at relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("boundary layer carries {fraction:e} of the mass at t = {t}")]
    BoundaryMassExceeded { t: f64, fraction: f64 },

    #[error("weight 2a = {two_a} is not below the fitted decay rate {decay_rate} at t = {t}")]
    WeightExceedsDecay { t: f64, two_a: f64, decay_rate: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidInput(msg.into())
}
