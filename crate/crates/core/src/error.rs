use thiserror::Error;

/// Errors raised by the numerical kernels and models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix is singular to working precision (condition estimate {condition_estimate:.3e})")]
    Singular { condition_estimate: f64 },

    #[error("steady state is not unique: the generator has a degenerate null space")]
    NonUniqueSteadyState,

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("time step too large: dt * spectral bound = {product:.3e} (must be < 0.1)")]
    StepTooLarge { product: f64 },

    #[error("trace drift {drift:.3e} exceeds 1e-6; reduce the step size")]
    TraceDrift { drift: f64 },

    #[error("state is not stationary under the joint generator (residual {residual:.3e})")]
    NotSteady { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("every grid point of the objective diverged")]
    AllDivergent,
}

pub type Result<T> = std::result::Result<T, Error>;
