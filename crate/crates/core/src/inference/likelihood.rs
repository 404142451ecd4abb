#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::density::{density_grid, density_grid_covering, Halfwidth};
use crate::error::{check_positive, Error, Result};
use crate::geometry::{jeffreys_prior, CoordinateChart};
use crate::levy::LevyModel;
use crate::quadrature::QuadratureConfig;

/// Grid used by likelihood evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodOptions {
    /// Power of two ≥ 1024.
    pub n_points: usize,
    pub quadrature: QuadratureConfig,
    /// `(center, halfwidth)` pinning the grid. Unset, the grid follows the
    /// model and is widened to cover the data; set, its nodes stay put as the
    /// parameters move, which keeps `l` smooth in them.
    pub window: Option<(f64, f64)>,
}

impl Default for LikelihoodOptions {
    fn default() -> Self {
        Self {
            n_points: 1 << 13,
            quadrature: QuadratureConfig::default(),
            window: None,
        }
    }
}

/// `l(ξ) = Σ log p_t(x_i)` with the pdf log-linearly interpolated on an FFT grid
/// wide enough to cover the data.
pub fn log_likelihood(
    model: &LevyModel,
    data: &[f64],
    t: f64,
    opts: &LikelihoodOptions,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::precondition("log-likelihood of an empty data set"));
    }
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(alloc::format!("non-finite observation {x}")));
    }
    let grid = match opts.window {
        None => density_grid_covering(model, t, opts.n_points, data, &opts.quadrature)?,
        Some((center, halfwidth)) => {
            let g = density_grid(
                model,
                t,
                opts.n_points,
                Halfwidth::Pinned { center, halfwidth },
                &opts.quadrature,
            )?;
            if let Some(x) = data.iter().find(|&&x| !g.covers(x)) {
                return Err(Error::precondition(alloc::format!(
                    "observation {x} lies outside the pinned window {center} ± {halfwidth}"
                )));
            }
            g
        }
    };
    Ok(data.iter().map(|&x| grid.log_pdf_at(x)).sum())
}

/// `log 𝒥(ξ)` on the `(λ+, λ-)` chart with horizon `T`.
pub fn log_jeffreys(model: &LevyModel, horizon: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_positive("T", horizon)?;
    let chart = CoordinateChart::lambda(model.measure())?;
    Ok(jeffreys_prior(model, &chart, horizon, cfg)?.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenalizedLikelihood {
    /// `l* = l + log 𝒥`
    pub value: f64,
    pub log_likelihood: f64,
    pub log_prior: f64,
}

/// `l*(ξ) = l(ξ) + log 𝒥(ξ)`, the prior taken at horizon `T`.
pub fn penalized_log_likelihood(
    model: &LevyModel,
    data: &[f64],
    t: f64,
    horizon: f64,
    opts: &LikelihoodOptions,
) -> Result<PenalizedLikelihood> {
    let log_prior = log_jeffreys(model, horizon, &opts.quadrature)?;
    let log_likelihood = log_likelihood(model, data, t, opts)?;
    Ok(PenalizedLikelihood {
        value: log_likelihood + log_prior,
        log_likelihood,
        log_prior,
    })
}
