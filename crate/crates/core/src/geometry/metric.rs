use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::chart::{Coordinate, CoordinateChart};
use super::tensor::{ConnectionTensor, MetricMatrix};
use crate::divergence::{self, DivergenceRequest, MethodPreference};
use crate::error::{check_positive, Error, Result};
use crate::levy::{self, LevyMeasure, LevyModel};
use crate::models;
use crate::quadrature::{self, QuadratureConfig};

/// Relative metric step `h = METRIC_STEP·max(1, |ξ|)`.
pub const METRIC_STEP: f64 = 1e-3;
/// Relative connection step `h = CONNECTION_STEP·max(1, |ξ|)`.
pub const CONNECTION_STEP: f64 = 1e-2;

/// Largest stencil noise, relative to the largest entry, accepted before
/// reporting [`Error::StepTooSmall`].
const STENCIL_NOISE_LIMIT: f64 = 1e-5;

fn lambda_coordinates(model: &LevyModel, chart: &CoordinateChart) -> Result<()> {
    if model.measure().lambdas().is_none() {
        return Err(Error::UnsupportedCoordinate(chart.names()[0].name()));
    }
    Ok(())
}

/// `T∫ s_i s_j … ν(dx)` for a product of scores times `weight(x)`.
fn score_moment<W: Fn(f64) -> f64>(
    measure: &LevyMeasure,
    coords: &[Coordinate],
    weight: W,
    window: bool,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let integrand = |x: f64| {
        let mut v = weight(x) * measure.density_at(x);
        for c in coords {
            v *= c.score(x);
        }
        v
    };
    let tails = measure.tail_decay();
    let r = if window {
        quadrature::integrate_unit_window(integrand, cfg)?
    } else {
        quadrature::integrate_line(integrand, tails, cfg)?
    };
    Ok(r.value)
}

/// `∂_{coords} d` of the drift functional entering the `σ ≠ 0` blocks:
/// `γ − ∫_{−1}^{1} xν(dx)` in general, `∫(e^x − 1)ν(dx)` for martingale models.
fn drift_derivative(
    model: &LevyModel,
    coords: &[Coordinate],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let m = model.measure();
    if model.is_martingale() {
        let tails = levy::shifted_tails(m.tail_decay(), -1.0)?;
        let r = quadrature::integrate_line(
            |x| {
                let mut v = x.exp_m1() * m.density_at(x);
                for c in coords {
                    v *= c.score(x);
                }
                v
            },
            tails,
            cfg,
        )?;
        Ok(r.value)
    } else {
        Ok(-score_moment(m, coords, |x| x, true, cfg)?)
    }
}

/// Fisher metric `g_ij` by quadrature:
/// `(T/σ²)∂_i d ∂_j d + T∫ ∂_i log(dν/dx) ∂_j log(dν/dx) ν(dx)`, the first
/// block being absent for `σ = 0`.
pub fn fisher_metric(
    model: &LevyModel,
    chart: &CoordinateChart,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<MetricMatrix> {
    check_positive("T", horizon)?;
    lambda_coordinates(model, chart)?;
    let names = chart.names();
    let d = names.len();
    let mut g = MetricMatrix::zeros(d, horizon);
    let sigma = model.sigma();
    let drift: Vec<f64> = if sigma > 0.0 {
        names
            .iter()
            .map(|&c| drift_derivative(model, &[c], cfg))
            .collect::<Result<_>>()?
    } else {
        vec![0.0; d]
    };
    for i in 0..d {
        for j in i..d {
            let mut v = horizon
                * score_moment(model.measure(), &[names[i], names[j]], |_| 1.0, false, cfg)?;
            if sigma > 0.0 {
                v += horizon / (sigma * sigma) * drift[i] * drift[j];
            }
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    Ok(g)
}

/// α-connection `Γ^{(α)}_{ij,k}` by quadrature:
/// `(T/σ²)∂_i∂_j d ∂_k d + T∫(∂_i∂_j log ν + (1−α)/2·∂_i log ν ∂_j log ν) ∂_k log ν dν`.
/// Exponential tempering makes `∂_i∂_j log(dν/dx)` vanish.
pub fn alpha_connection(
    model: &LevyModel,
    chart: &CoordinateChart,
    alpha: f64,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<ConnectionTensor> {
    check_positive("T", horizon)?;
    lambda_coordinates(model, chart)?;
    let names = chart.names();
    let d = names.len();
    let sigma = model.sigma();
    let mut t = ConnectionTensor::zeros(d, alpha);
    let w = 0.5 * (1.0 - alpha);
    for i in 0..d {
        for j in i..d {
            let second = if sigma > 0.0 {
                drift_derivative(model, &[names[i], names[j]], cfg)?
            } else {
                0.0
            };
            for k in 0..d {
                let mut v = if w == 0.0 {
                    0.0
                } else {
                    horizon
                        * w
                        * score_moment(
                            model.measure(),
                            &[names[i], names[j], names[k]],
                            |_| 1.0,
                            false,
                            cfg,
                        )?
                };
                if sigma > 0.0 {
                    v += horizon / (sigma * sigma)
                        * second
                        * drift_derivative(model, &[names[k]], cfg)?;
                }
                t.set(i, j, k, v);
                t.set(j, i, k, v);
            }
        }
    }
    Ok(t)
}

/// The divergence used by the finite-difference stencils together with the
/// factor turning its mixed derivatives into the geometry:
/// `−4/(1−α²)·Δ` for `α ≠ ±1`, and `−D^{(±1)}` at the boundary, where `Δ`
/// vanishes identically.
struct StencilDivergence<'a> {
    model: &'a LevyModel,
    chart: &'a CoordinateChart,
    req: DivergenceRequest,
    scale: f64,
}

impl<'a> StencilDivergence<'a> {
    fn new(
        model: &'a LevyModel,
        chart: &'a CoordinateChart,
        alpha: f64,
        horizon: f64,
        cfg: &QuadratureConfig,
        method: MethodPreference,
    ) -> Result<Self> {
        check_positive("T", horizon)?;
        lambda_coordinates(model, chart)?;
        let req = DivergenceRequest::new(alpha, horizon)
            .with_quadrature(*cfg)
            .with_method(method);
        let scale = if alpha.abs() == 1.0 {
            -1.0
        } else {
            -4.0 / (1.0 - alpha * alpha)
        };
        Ok(Self {
            model,
            chart,
            req,
            scale,
        })
    }

    fn model_at(&self, point: &[f64]) -> Result<LevyModel> {
        self.chart.check_inside(point)?;
        let m = self.chart.apply(self.model.measure(), point)?;
        self.model.with_measure(m, &self.req.quadrature)
    }

    /// `(value, noise)` of the divergence between the shifted points.
    fn eval(&self, p_point: &[f64], q_point: &[f64]) -> Result<(f64, f64)> {
        let p = self.model_at(p_point)?;
        let q = self.model_at(q_point)?;
        let r = if self.req.alpha.abs() == 1.0 {
            let r = divergence::alpha_divergence(&p, &q, &self.req)?;
            (r.value, r.abs_error)
        } else {
            let r = divergence::delta_alpha(&p, &q, &self.req)?;
            (r.delta, r.abs_error)
        };
        Ok((r.0, r.1 + 4.0 * f64::EPSILON * r.0.abs()))
    }
}

fn steps(chart: &CoordinateChart, rel: f64) -> Vec<f64> {
    chart
        .point()
        .iter()
        .map(|x| rel * x.abs().max(1.0))
        .collect()
}

fn shifted(point: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut p = point.to_vec();
    for &(i, dx) in moves {
        p[i] += dx;
    }
    p
}

/// `g_ij = −4/(1−α²)·∂_i∂̃_jΔ^{(α)}_T` at `ξ = ξ̃`, by central mixed differences.
///
/// `step` is relative: `h_i = step·max(1, |ξ_i|)` (default [`METRIC_STEP`]).
pub fn metric_from_divergence(
    model: &LevyModel,
    chart: &CoordinateChart,
    alpha: f64,
    horizon: f64,
    step: Option<f64>,
    cfg: &QuadratureConfig,
    method: MethodPreference,
) -> Result<MetricMatrix> {
    let div = StencilDivergence::new(model, chart, alpha, horizon, cfg, method)?;
    let h = steps(chart, step.unwrap_or(METRIC_STEP));
    let x = chart.point();
    let d = chart.dim();
    let mut g = MetricMatrix::zeros(d, horizon);
    let mut noise: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut sum = 0.0;
            let mut err = 0.0;
            for (a, b, sign) in [
                (1.0, 1.0, 1.0),
                (1.0, -1.0, -1.0),
                (-1.0, 1.0, -1.0),
                (-1.0, -1.0, 1.0),
            ] {
                let (v, e) =
                    div.eval(&shifted(x, &[(i, a * h[i])]), &shifted(x, &[(j, b * h[j])]))?;
                sum += sign * v;
                err += e;
            }
            let denom = 4.0 * h[i] * h[j];
            g.set(i, j, div.scale * sum / denom);
            noise = noise.max(div.scale.abs() * err / denom);
        }
    }
    check_noise(noise, g.max_abs(), step.unwrap_or(METRIC_STEP))?;
    Ok(g)
}

/// `Γ^{(α)}_{ij,k} = −4/(1−α²)·∂_i∂_j∂̃_kΔ^{(α)}_T` at `ξ = ξ̃`.
///
/// `step` is relative: `h_i = step·max(1, |ξ_i|)` (default [`CONNECTION_STEP`]).
pub fn connection_from_divergence(
    model: &LevyModel,
    chart: &CoordinateChart,
    alpha: f64,
    horizon: f64,
    step: Option<f64>,
    cfg: &QuadratureConfig,
    method: MethodPreference,
) -> Result<ConnectionTensor> {
    let div = StencilDivergence::new(model, chart, alpha, horizon, cfg, method)?;
    let h = steps(chart, step.unwrap_or(CONNECTION_STEP));
    let x = chart.point();
    let d = chart.dim();
    let mut t = ConnectionTensor::zeros(d, alpha);
    let mut noise: f64 = 0.0;
    // the tensor may vanish identically (e.g. α = 1), so noise is judged
    // against the size of the stencil terms before cancellation
    let mut gross: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            // second derivative stencil in the P-coordinates (weights, moves)
            let stencil: Vec<(f64, Vec<(usize, f64)>)> = if i == j {
                vec![
                    (1.0, vec![(i, h[i])]),
                    (-2.0, vec![]),
                    (1.0, vec![(i, -h[i])]),
                ]
            } else {
                vec![
                    (1.0, vec![(i, h[i]), (j, h[j])]),
                    (-1.0, vec![(i, h[i]), (j, -h[j])]),
                    (-1.0, vec![(i, -h[i]), (j, h[j])]),
                    (1.0, vec![(i, -h[i]), (j, -h[j])]),
                ]
            };
            let second_denom = if i == j {
                h[i] * h[i]
            } else {
                4.0 * h[i] * h[j]
            };
            for k in 0..d {
                let mut sum = 0.0;
                let mut err = 0.0;
                let mut size = 0.0;
                for (b, sign) in [(1.0, 1.0), (-1.0, -1.0)] {
                    let q = shifted(x, &[(k, b * h[k])]);
                    for (weight, moves) in &stencil {
                        let (v, e) = div.eval(&shifted(x, moves), &q)?;
                        sum += sign * weight * v;
                        err += weight.abs() * e;
                        size += (weight * v).abs();
                    }
                }
                let denom = second_denom * 2.0 * h[k];
                let v = div.scale * sum / denom;
                t.set(i, j, k, v);
                t.set(j, i, k, v);
                noise = noise.max(div.scale.abs() * err / denom);
                gross = gross.max(div.scale.abs() * size / denom);
            }
        }
    }
    check_noise(noise, gross, step.unwrap_or(CONNECTION_STEP))?;
    Ok(t)
}

fn check_noise(noise: f64, magnitude: f64, step: f64) -> Result<()> {
    // an all-zero result carries no scale to compare against
    if magnitude > 0.0 && noise > STENCIL_NOISE_LIMIT * magnitude {
        return Err(Error::StepTooSmall {
            step,
            residual: noise / magnitude,
        });
    }
    Ok(())
}

/// Metric used by priors and the Laplace–Beltrami operator: closed form for
/// `σ = 0` named families, quadrature otherwise.
pub fn model_metric(
    model: &LevyModel,
    chart: &CoordinateChart,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<MetricMatrix> {
    if model.sigma() == 0.0 && model.measure().sides().is_some() {
        let full = models::closed_form_fisher_metric(model.measure(), horizon)?;
        let idx: Vec<usize> = chart.names().iter().map(|c| c.index()).collect();
        Ok(full.select(&idx))
    } else {
        fisher_metric(model, chart, horizon, cfg)
    }
}

/// Unnormalized Jeffreys prior `√det g`.
pub fn jeffreys_prior(
    model: &LevyModel,
    chart: &CoordinateChart,
    horizon: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let g = model_metric(model, chart, horizon, cfg)?;
    if !g.is_positive_definite() {
        return Err(Error::domain(
            "the Fisher metric is not positive definite at this point",
        ));
    }
    Ok(g.det().sqrt())
}
