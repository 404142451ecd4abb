//! Fisher metric, α-connections, Jeffreys prior and the Laplace–Beltrami operator.
//!
//! Two routes are provided for the metric and connection: quadrature of the
//! score integrals, and mixed finite differences of `Δ^{(α)}_T` at coinciding
//! arguments. Closed forms for the named families live in [`crate::models`].

mod chart;
mod laplace;
mod metric;
mod tensor;

pub use chart::{Coordinate, CoordinateChart};
pub use laplace::{
    laplace_beltrami, laplace_beltrami_rho, laplace_beltrami_rho_with, superharmonic_scan,
    RangePolicy, RhoKind, RhoSpec, ScalarField, ScanReport, LB_STEP,
};
pub use metric::{
    alpha_connection, connection_from_divergence, fisher_metric, jeffreys_prior,
    metric_from_divergence, model_metric, CONNECTION_STEP, METRIC_STEP,
};
pub use tensor::{ConnectionTensor, MetricMatrix, MAX_CONDITION};
