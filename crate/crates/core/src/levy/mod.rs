//! Lévy triplets, Lévy measures and the quantities built from them.

mod equivalence;
mod measure;
mod model;

pub use equivalence::{
    check_equivalence, eta, log_rn_derivative, u_triplet, EquivalenceReport, RnDerivative, UTriplet,
};
pub use measure::{
    DensityFn, Family, GenericMeasure, LevyMeasure, TemperedSide, TAIL_INDEX_POLE_GUARD,
    VG_REGULARIZATION_MAX,
};
pub use model::{
    characteristic_exponent, characteristic_exponent_complex, jump_integral, levy_density,
    martingale_drift, ComplexIntegral, ExponentEvaluator, LevyModel,
};

pub(crate) use equivalence::{compensator_difference, ensure_measures_equivalent};
pub(crate) use model::shifted_tails;
