//! Densities by Fourier inversion, simulation, and plain or
//! Jeffreys-penalized maximum likelihood on `(λ+, λ-)`.

mod density;
mod fft;
mod fit;
mod likelihood;
mod optimize;
mod sample;

pub use density::{
    cumulants, density_grid, density_grid_covering, Cumulants, DensityGrid, Halfwidth,
    AUTO_HALFWIDTH_SDS, DEFAULT_GRID_POINTS, MIN_GRID_POINTS, NORMALIZATION_TOL, PDF_FLOOR,
};
pub use fft::fft;
pub use fit::{
    aggregate, bias_benchmark, fit, fit_likelihood_options, run_replicate, BenchmarkConfig,
    BenchmarkReport, FitOptions, FitResult, ReplicateOutcome, MAX_FAILURE_FRACTION, MIN_REPLICATES,
};
pub use likelihood::{
    log_jeffreys, log_likelihood, penalized_log_likelihood, LikelihoodOptions, PenalizedLikelihood,
};
pub use optimize::{maximize, NelderMeadOptions, NelderMeadResult};
pub use sample::{model_fingerprint, sample_from_grid, simulate, SampleSet};
