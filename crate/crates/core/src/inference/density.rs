use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use num_complex::Complex64;

use super::fft::fft;
use crate::error::{check_positive, Error, Result};
use crate::levy::{ExponentEvaluator, LevyModel};
use crate::quadrature::{self, QuadratureConfig};

pub const DEFAULT_GRID_POINTS: usize = 1 << 14;
pub const MIN_GRID_POINTS: usize = 1 << 10;
/// AUTO halfwidth in standard deviations.
pub const AUTO_HALFWIDTH_SDS: f64 = 12.0;
pub const NORMALIZATION_TOL: f64 = 1e-4;
/// Floor applied to the pdf before taking logs.
pub const PDF_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Halfwidth {
    /// `AUTO_HALFWIDTH_SDS` standard deviations around the mean.
    #[default]
    Auto,
    /// Given halfwidth around the mean.
    Fixed(f64),
    /// `center ± halfwidth` regardless of the model, so grids of different
    /// models share their nodes.
    Pinned { center: f64, halfwidth: f64 },
}

/// First two cumulants of `X_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cumulants {
    pub mean: f64,
    pub variance: f64,
}

/// `mean = t(γ + ∫_{|x|>1} xν)`, `variance = t(σ² + ∫x²ν)`, by quadrature.
pub fn cumulants(model: &LevyModel, t: f64, cfg: &QuadratureConfig) -> Result<Cumulants> {
    check_positive("t", t)?;
    let m = model.measure();
    let (mut large, mut second) = (0.0, 0.0);
    if !m.is_zero() {
        let tails = m.tail_decay();
        second = quadrature::integrate_line(|x| x * x * m.density_at(x), tails, cfg)?.value;
        let plus = quadrature::integrate_half_line(
            |u| (1.0 + u) * m.density_at(1.0 + u),
            tails.plus,
            cfg,
        )?;
        let minus = quadrature::integrate_half_line(
            |u| (1.0 + u) * m.density_at(-1.0 - u),
            tails.minus,
            cfg,
        )?;
        large = plus.value - minus.value;
    }
    let s = model.sigma();
    Ok(Cumulants {
        mean: t * (model.gamma() + large),
        variance: t * (s * s + second),
    })
}

/// Density of `X_t` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub t: f64,
    pub x_min: f64,
    pub dx: f64,
    pub pdf: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Pre-clip negative mass + normalization defect + estimated mass beyond the edges.
    pub truncation_error_bound: f64,
}

impl DensityGrid {
    pub fn len(&self) -> usize {
        self.pdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pdf.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.x(k))
    }

    pub fn covers(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max()
    }

    /// Log-linear interpolation of the floored pdf; `ln PDF_FLOOR` off the grid.
    pub fn log_pdf_at(&self, x: f64) -> f64 {
        if !self.covers(x) {
            return PDF_FLOOR.ln();
        }
        let s = (x - self.x_min) / self.dx;
        let k = (s.floor() as usize).min(self.len() - 2);
        let w = s - k as f64;
        let lo = self.pdf[k].max(PDF_FLOOR).ln();
        let hi = self.pdf[k + 1].max(PDF_FLOOR).ln();
        lo + w * (hi - lo)
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        self.log_pdf_at(x).exp()
    }

    /// Inverse of the piecewise-linear cdf.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.len();
        if u <= 0.0 {
            return self.x_min;
        }
        if u >= self.cdf[n - 1] {
            return self.x_max();
        }
        let k = self.cdf.partition_point(|&c| c < u);
        if k == 0 {
            return self.x_min;
        }
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        if c1 <= c0 {
            return self.x(k);
        }
        self.x(k - 1) + self.dx * (u - c0) / (c1 - c0)
    }

    /// Trapezoid `∫ pdf`.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.pdf, self.dx)
    }

    /// Mean and variance by trapezoid moments.
    pub fn moments(&self) -> Cumulants {
        let m1: Vec<f64> = self.points().zip(&self.pdf).map(|(x, p)| x * p).collect();
        let mean = trapezoid(&m1, self.dx);
        let m2: Vec<f64> = self
            .points()
            .zip(&self.pdf)
            .map(|(x, p)| (x - mean) * (x - mean) * p)
            .collect();
        Cumulants {
            mean,
            variance: trapezoid(&m2, self.dx),
        }
    }
}

fn trapezoid(v: &[f64], dx: f64) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    dx * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[n - 1]))
}

fn check_grid_points(n_points: usize) -> Result<()> {
    if !n_points.is_power_of_two() || n_points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter {
            name: "n_points",
            value: n_points as f64,
            reason: "must be a power of two ≥ 1024",
        });
    }
    Ok(())
}

/// Fourier inversion of `exp(Φ_t)` on `x_k = x_min + k·dx`, `k < N`, with
/// halfwidth `H = N·dx/2`, centred at the mean unless pinned.
///
/// With `z_j = (j − N/2)·dz`, `dz = 2π/(N·dx)`, the inversion sum factors as
/// `pdf_k = (dz/2π)(−1)^k·DFT[φ(z_j)e^{−iz_j x_min}]_k`.
pub fn density_grid(
    model: &LevyModel,
    t: f64,
    n_points: usize,
    halfwidth: Halfwidth,
    cfg: &QuadratureConfig,
) -> Result<DensityGrid> {
    check_grid_points(n_points)?;
    let c = cumulants(model, t, cfg)?;
    if !(c.variance > 0.0) {
        return Err(Error::domain(
            "X_t is degenerate (zero variance); it has no density",
        ));
    }
    let sd = c.variance.sqrt();
    let h = match halfwidth {
        Halfwidth::Auto => AUTO_HALFWIDTH_SDS * sd,
        Halfwidth::Fixed(h) | Halfwidth::Pinned { halfwidth: h, .. } => {
            check_positive("halfwidth", h)?;
            h
        }
    };
    let center = match halfwidth {
        Halfwidth::Pinned { center, .. } if center.is_finite() => center,
        Halfwidth::Pinned { center, .. } => {
            return Err(Error::domain(alloc::format!("grid center {center}")))
        }
        _ => c.mean,
    };
    let n = n_points;
    let x_min = center - h;
    let dx = 2.0 * h / n as f64;
    let dz = 2.0 * PI / (n as f64 * dx);
    let eval = ExponentEvaluator::new(model, cfg)?;

    let mut phi = alloc::vec![Complex64::new(0.0, 0.0); n];
    // φ(−z) = conj φ(z): evaluate j ≤ N/2 and mirror
    for j in 0..=n / 2 {
        let z = (j as f64 - (n / 2) as f64) * dz;
        phi[j] = eval.eval(z, t)?.exp();
        if j > 0 && j < n / 2 {
            phi[n - j] = phi[j].conj();
        }
    }
    for (j, v) in phi.iter_mut().enumerate() {
        let z = (j as f64 - (n / 2) as f64) * dz;
        let arg = -z * x_min;
        *v *= Complex64::new(arg.cos(), arg.sin());
    }
    fft(&mut phi);

    let norm = dz / (2.0 * PI);
    let mut negative = 0.0;
    let mut pdf: Vec<f64> = phi
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let p = if k % 2 == 0 { v.re } else { -v.re } * norm;
            if p < 0.0 {
                negative -= p * dx;
                0.0
            } else {
                p
            }
        })
        .collect();
    let mass = trapezoid(&pdf, dx);
    let edge = (pdf[0] + pdf[n - 1]) * sd;
    if !((mass - 1.0).abs() <= NORMALIZATION_TOL) || edge > NORMALIZATION_TOL {
        return Err(Error::GridTooSmall {
            mass,
            suggested_halfwidth: 2.0 * h,
        });
    }
    for p in &mut pdf {
        *p /= mass;
    }
    let mut cdf = Vec::with_capacity(n);
    let mut acc = 0.0;
    cdf.push(0.0);
    for k in 1..n {
        acc += 0.5 * dx * (pdf[k - 1] + pdf[k]);
        cdf.push(acc);
    }
    Ok(DensityGrid {
        t,
        x_min,
        dx,
        pdf,
        cdf,
        truncation_error_bound: negative + (mass - 1.0).abs() + edge,
    })
}

/// Like [`density_grid`] but widens the domain (keeping `dx`) until every
/// value in `data` lies on the grid. The point count is capped at `2^20`.
pub fn density_grid_covering(
    model: &LevyModel,
    t: f64,
    n_points: usize,
    data: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DensityGrid> {
    const MAX_POINTS: usize = 1 << 20;
    let grid = density_grid(model, t, n_points, Halfwidth::Auto, cfg)?;
    let (lo, hi) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if data.is_empty() || (grid.covers(lo) && grid.covers(hi)) {
        return Ok(grid);
    }
    let center = grid.x_min + 0.5 * grid.dx * grid.len() as f64;
    let h = 1.05 * (center - lo).max(hi - center);
    let mut n = n_points;
    while 2.0 * h / (n as f64) > grid.dx && n < MAX_POINTS {
        n <<= 1;
    }
    density_grid(model, t, n, Halfwidth::Fixed(h), cfg)
}
