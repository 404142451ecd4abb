use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::density::{density_grid, DensityGrid, Halfwidth, DEFAULT_GRID_POINTS};
use crate::error::{check_positive, Result};
use crate::levy::LevyModel;
use crate::quadrature::QuadratureConfig;

/// Increments `X_t` drawn i.i.d. from one model.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub t: f64,
    pub seed: u64,
    /// [`crate::levy::LevyMeasure::fingerprint`] plus `σ` and `γ`.
    pub model: String,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn model_fingerprint(model: &LevyModel) -> String {
    alloc::format!(
        "{};sigma={:e};gamma={:e}",
        model.measure().fingerprint(),
        model.sigma(),
        model.gamma()
    )
}

/// Inverse-cdf sampling from a precomputed grid.
pub fn sample_from_grid(grid: &DensityGrid, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| grid.quantile(rng.random::<f64>())).collect()
}

/// `n` increments over horizon `t` by inverse-cdf sampling against the
/// default FFT grid. Deterministic in `(model, t, n, seed)`.
pub fn simulate(
    model: &LevyModel,
    t: f64,
    n: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<SampleSet> {
    check_positive("t", t)?;
    let grid = density_grid(model, t, DEFAULT_GRID_POINTS, Halfwidth::Auto, cfg)?;
    Ok(SampleSet {
        values: sample_from_grid(&grid, n, seed),
        t,
        seed,
        model: model_fingerprint(model),
    })
}
