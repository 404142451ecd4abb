use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::density::{density_grid, density_grid_covering, Halfwidth, DEFAULT_GRID_POINTS};
use super::likelihood::{log_jeffreys, log_likelihood, LikelihoodOptions};
use super::optimize::{maximize, NelderMeadOptions};
use super::sample::sample_from_grid;
use crate::error::{check_positive, Error, Result};
use crate::levy::LevyModel;

/// Relative stencil step for the first-order convergence check.
const GRADIENT_STEP: f64 = 1e-4;
/// Width of the pinned fitting window relative to the covering grid at `init`.
const WINDOW_GROWTH: f64 = 2.0;
/// Converged fits must have central-difference slopes below this (per unit
/// objective scale `max(1, |l|)`) in every coordinate not pinned at a bound.
const GRADIENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub penalized: bool,
    /// Bounds on `(λ+, λ-)`.
    pub bounds: [(f64, f64); 2],
    pub optimizer: NelderMeadOptions,
    /// Jittered restarts after the run from `init`.
    pub restarts: usize,
    /// Restart `i` starts at `init·(1 + jitter·u)`, `u ~ U(−1, 1)`.
    pub jitter: f64,
    pub seed: u64,
    /// Horizon of the Jeffreys prior; `t·n` when unset.
    pub prior_horizon: Option<f64>,
    pub likelihood: LikelihoodOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            penalized: false,
            bounds: [(1e-2, 1e2); 2],
            optimizer: NelderMeadOptions::default(),
            restarts: 3,
            jitter: 0.2,
            seed: 0,
            prior_horizon: None,
            likelihood: LikelihoodOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `(λ̂+, λ̂-)`
    pub estimates: (f64, f64),
    /// `l` or `l*` at the estimates.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub penalized: bool,
    /// Largest central-difference slope in a free coordinate, scaled by `max(1, |objective|)`.
    pub gradient_residual: f64,
}

/// `l` or `l*` at `(λ+, λ-)` with the template's other parameters; `−∞` if the
/// point cannot be evaluated.
fn objective(
    template: &LevyModel,
    data: &[f64],
    t: f64,
    lambdas: &[f64],
    opts: &FitOptions,
) -> f64 {
    let eval = || -> Result<f64> {
        let cfg = &opts.likelihood.quadrature;
        let measure = template.measure().with_lambdas(lambdas[0], lambdas[1])?;
        let model = template.with_measure(measure, cfg)?;
        let mut v = log_likelihood(&model, data, t, &opts.likelihood)?;
        if opts.penalized {
            let horizon = opts.prior_horizon.unwrap_or(t * data.len() as f64);
            v += log_jeffreys(&model, horizon, cfg)?;
        }
        Ok(v)
    };
    match eval() {
        Ok(v) if !v.is_nan() => v,
        _ => f64::NEG_INFINITY,
    }
}

fn gradient_residual<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x: &[f64],
    value: f64,
    bounds: &[(f64, f64)],
) -> f64 {
    let scale = value.abs().max(1.0);
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let h = GRADIENT_STEP * x[i].abs().max(1e-3);
        if x[i] - h < bounds[i].0 || x[i] + h > bounds[i].1 {
            continue;
        }
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[i] += h;
        down[i] -= h;
        // slope per relative change of the coordinate
        let slope = (f(&up) - f(&down)) / (2.0 * h) * x[i].abs().max(1e-3);
        worst = worst.max(slope.abs() / scale);
    }
    worst
}

/// Likelihood options used by [`fit`]: unless `opts` already pins a window,
/// the grid is pinned around the covering grid of the model at `init`, twice
/// as wide with the same spacing. Moving nodes would add a non-smooth ripple to
/// `l(λ±)` wherever the density is sharply peaked.
pub fn fit_likelihood_options(
    template: &LevyModel,
    data: &[f64],
    t: f64,
    init: (f64, f64),
    opts: &FitOptions,
) -> Result<LikelihoodOptions> {
    let mut lik = opts.likelihood;
    if lik.window.is_some() {
        return Ok(lik);
    }
    let cfg = &lik.quadrature;
    let start = template.with_measure(template.measure().with_lambdas(init.0, init.1)?, cfg)?;
    let g = density_grid_covering(&start, t, lik.n_points, data, cfg)?;
    let half = 0.5 * g.dx * g.len() as f64;
    lik.window = Some((g.x_min + half, WINDOW_GROWTH * half));
    lik.n_points = (g.len() as f64 * WINDOW_GROWTH) as usize;
    Ok(lik)
}

/// Maximizes `l` (or `l*`) over `(λ+, λ-)`, holding the template's `σ`, `γ`,
/// `C±` and `a±` fixed. Runs from `init` and from `restarts` jittered copies;
/// the best objective wins, ties broken by the lexicographically smaller estimate.
pub fn fit(
    template: &LevyModel,
    data: &[f64],
    t: f64,
    init: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult> {
    check_positive("t", t)?;
    if data.is_empty() {
        return Err(Error::precondition("cannot fit an empty data set"));
    }
    template
        .measure()
        .lambdas()
        .ok_or(Error::UnsupportedCoordinate("lambda_plus"))?;
    let bounds = opts.bounds;
    for (v, (lo, hi)) in [init.0, init.1].iter().zip(&bounds) {
        if !(lo < hi) || !(*lo > 0.0) {
            return Err(Error::precondition(
                "fit bounds must satisfy 0 < lower < upper",
            ));
        }
        if !(v >= lo && v <= hi) {
            return Err(Error::precondition(alloc::format!(
                "initial value {v} outside bounds [{lo}, {hi}]"
            )));
        }
    }
    let pinned = FitOptions {
        likelihood: fit_likelihood_options(template, data, t, init, opts)?,
        ..*opts
    };
    let opts = &pinned;
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let mut starts = alloc::vec![[init.0, init.1]];
    for _ in 0..opts.restarts {
        let s = [
            (init.0 * (1.0 + opts.jitter * rng.random_range(-1.0..1.0)))
                .clamp(bounds[0].0, bounds[0].1),
            (init.1 * (1.0 + opts.jitter * rng.random_range(-1.0..1.0)))
                .clamp(bounds[1].0, bounds[1].1),
        ];
        starts.push(s);
    }
    let f = |x: &[f64]| objective(template, data, t, x, opts);
    let mut best: Option<super::optimize::NelderMeadResult> = None;
    for s in &starts {
        let r = maximize(f, s, &bounds, &opts.optimizer);
        let better = match &best {
            None => true,
            Some(b) => r.value > b.value || (r.value == b.value && r.x < b.x),
        };
        if better {
            best = Some(r);
        }
    }
    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::domain(
            "the likelihood could not be evaluated anywhere in the search region",
        ));
    }
    let residual = gradient_residual(f, &best.x, best.value, &bounds);
    Ok(FitResult {
        estimates: (best.x[0], best.x[1]),
        objective: best.value,
        iterations: best.iterations,
        converged: best.converged && residual <= GRADIENT_TOL,
        penalized: opts.penalized,
        gradient_residual: residual,
    })
}

pub const MIN_REPLICATES: usize = 50;
/// More failed replicates than this fraction aborts the benchmark.
pub const MAX_FAILURE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    /// Model at the true parameters; its `(λ+, λ-)` are the truth.
    pub truth: LevyModel,
    pub t: f64,
    pub n_per_replicate: usize,
    pub replicates: usize,
    pub seed: u64,
    pub fit: FitOptions,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("t", self.t)?;
        if self.replicates < MIN_REPLICATES {
            return Err(Error::precondition(alloc::format!(
                "bias benchmark needs at least {MIN_REPLICATES} replicates, got {}",
                self.replicates
            )));
        }
        if self.n_per_replicate == 0 {
            return Err(Error::precondition("n_per_replicate must be positive"));
        }
        self.truth
            .measure()
            .lambdas()
            .ok_or(Error::UnsupportedCoordinate("lambda_plus"))?;
        Ok(())
    }

    fn true_lambdas(&self) -> (f64, f64) {
        self.truth.measure().lambdas().expect("validated")
    }
}

/// Plain and penalized estimates from one replicate (shared data).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateOutcome {
    pub plain: (f64, f64),
    pub penalized: (f64, f64),
}

/// Replicate `r`: simulate with seed `seed + r`, then fit both ways from the truth.
/// A fit that errors or fails to converge makes the replicate a failure.
pub fn run_replicate(cfg: &BenchmarkConfig, r: usize) -> Result<ReplicateOutcome> {
    let seed = cfg.seed.wrapping_add(r as u64);
    let grid = density_grid(
        &cfg.truth,
        cfg.t,
        DEFAULT_GRID_POINTS,
        Halfwidth::Auto,
        &cfg.fit.likelihood.quadrature,
    )?;
    let data = sample_from_grid(&grid, cfg.n_per_replicate, seed);
    let init = cfg.true_lambdas();
    let run = |penalized: bool| -> Result<(f64, f64)> {
        let opts = FitOptions {
            penalized,
            seed,
            ..cfg.fit
        };
        let f = fit(&cfg.truth, &data, cfg.t, init, &opts)?;
        if !f.converged {
            return Err(Error::precondition(alloc::format!(
                "replicate {r} did not converge"
            )));
        }
        Ok(f.estimates)
    };
    Ok(ReplicateOutcome {
        plain: run(false)?,
        penalized: run(true)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// Componentwise `mean(λ̂) − λ` over successful replicates.
    pub mean_bias_plain: [f64; 2],
    pub mean_bias_penalized: [f64; 2],
    pub rmse_plain: [f64; 2],
    pub rmse_penalized: [f64; 2],
    pub failures: usize,
    pub replicates: usize,
}

/// Aggregates outcomes in replicate order, whatever order they were computed in.
pub fn aggregate(
    cfg: &BenchmarkConfig,
    outcomes: &[(usize, Result<ReplicateOutcome>)],
) -> Result<BenchmarkReport> {
    let mut ordered: Vec<&(usize, Result<ReplicateOutcome>)> = outcomes.iter().collect();
    ordered.sort_by_key(|o| o.0);
    let ok: Vec<ReplicateOutcome> = ordered
        .iter()
        .filter_map(|o| o.1.as_ref().ok().copied())
        .collect();
    let failures = outcomes.len() - ok.len();
    if failures as f64 > MAX_FAILURE_FRACTION * outcomes.len() as f64 || ok.is_empty() {
        return Err(Error::BenchmarkFailures {
            failures,
            replicates: outcomes.len(),
        });
    }
    let truth = cfg.true_lambdas();
    let truth = [truth.0, truth.1];
    let n = ok.len() as f64;
    let stats = |pick: fn(&ReplicateOutcome) -> (f64, f64)| {
        let mut bias = [0.0; 2];
        let mut sq = [0.0; 2];
        for o in &ok {
            let e = pick(o);
            for (i, v) in [e.0, e.1].iter().enumerate() {
                bias[i] += v - truth[i];
                sq[i] += (v - truth[i]) * (v - truth[i]);
            }
        }
        (
            [bias[0] / n, bias[1] / n],
            [(sq[0] / n).sqrt(), (sq[1] / n).sqrt()],
        )
    };
    let (mean_bias_plain, rmse_plain) = stats(|o| o.plain);
    let (mean_bias_penalized, rmse_penalized) = stats(|o| o.penalized);
    Ok(BenchmarkReport {
        mean_bias_plain,
        mean_bias_penalized,
        rmse_plain,
        rmse_penalized,
        failures,
        replicates: outcomes.len(),
    })
}

/// Sequential benchmark; the `levy-ig` crate runs replicates in parallel.
pub fn bias_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let outcomes: Vec<(usize, Result<ReplicateOutcome>)> = (0..cfg.replicates)
        .map(|r| (r, run_replicate(cfg, r)))
        .collect();
    aggregate(cfg, &outcomes)
}
