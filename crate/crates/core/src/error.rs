use alloc::string::String;

/// Errors raised by the numerical routines.
///
/// Violations found by [`check_equivalence`](crate::levy::check_equivalence)
/// are reported in its return value, not through this type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge within {subdivisions} subdivisions (partial estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("Gamma(-a) has a pole at a = {0}")]
    GammaPole(f64),

    #[error("density grid too small: captured mass {mass}, try a halfwidth of at least {suggested_halfwidth}")]
    GridTooSmall { mass: f64, suggested_halfwidth: f64 },

    #[error("finite-difference step {step:e} too small: stencil residual {residual:e}, use a larger step")]
    StepTooSmall { step: f64, residual: f64 },

    #[error("coordinate `{0}` is not supported by this Lévy measure")]
    UnsupportedCoordinate(&'static str),

    #[error(
        "metric is not positive definite or is ill-conditioned (condition number {condition:e})"
    )]
    IllConditioned { condition: f64 },

    #[error("benchmark failed: {failures} of {replicates} replicate fits failed")]
    BenchmarkFailures { failures: usize, replicates: usize },
}

impl Error {
    /// Stable machine-readable identifier, used in JSON error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::QuadratureNonConvergence { .. } => "quadrature_nonconvergence",
            Error::Divergent(_) => "divergent",
            Error::GammaPole(_) => "gamma_pole",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::StepTooSmall { .. } => "step_too_small",
            Error::UnsupportedCoordinate(_) => "unsupported_coordinate",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::BenchmarkFailures { .. } => "benchmark_failures",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
