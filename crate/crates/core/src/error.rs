use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integral did not converge: {0}")]
    NonIntegrable(String),

    #[error("density integrates to zero")]
    ZeroDensity,

    #[error("quadrature failed: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { error: f64, tolerance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("distribution is not isotropic (relative angular spread {0:e})")]
    NotIsotropic(f64),

    #[error("kernel denominator vanishes at y = {y:e} for omega = {omega:e}")]
    PoleOnContour { omega: f64, y: f64 },

    #[error("logarithmic fit failed: {0}")]
    FitFailure(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("Monte Carlo variance estimate diverged: {0}")]
    McVarianceExplosion(String),

    #[error("unit error: {0}")]
    Unit(String),

    #[error("need at least {required} trials, got {got}")]
    InsufficientTrials { required: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonIntegrable(_)
                | Error::ZeroDensity
                | Error::QuadratureFailure { .. }
                | Error::FitFailure(_)
                | Error::McVarianceExplosion(_)
        )
    }
}
