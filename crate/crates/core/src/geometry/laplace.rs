use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::chart::{Coordinate, CoordinateChart};
use super::tensor::MetricMatrix;
use crate::error::{check_positive, Error, Result};
use crate::levy::{Family, LevyMeasure};
use crate::models;

/// Relative Laplace–Beltrami stencil `h_i = LB_STEP·|ξ_i|`.
pub const LB_STEP: f64 = 1e-4;

/// A scalar field on the chart, with an optional analytic gradient.
pub trait ScalarField {
    fn value(&self, point: &[f64]) -> f64;

    /// Central differences unless overridden.
    fn gradient(&self, point: &[f64], steps: &[f64]) -> Vec<f64> {
        (0..point.len())
            .map(|i| {
                let mut up = point.to_vec();
                let mut down = point.to_vec();
                up[i] += steps[i];
                down[i] -= steps[i];
                (self.value(&up) - self.value(&down)) / (2.0 * steps[i])
            })
            .collect()
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for F {
    fn value(&self, point: &[f64]) -> f64 {
        self(point)
    }
}

/// `Δρ = (1/√det g)·∂_i(√det g·g^{ij}∂_jρ)` by central differences of the
/// flux `√det g·g^{ij}∂_jρ`, with `h_i = LB_STEP·|ξ_i|`.
pub fn laplace_beltrami<M, R>(metric_field: M, rho: &R, chart: &CoordinateChart) -> Result<f64>
where
    M: Fn(&[f64]) -> Result<MetricMatrix>,
    R: ScalarField + ?Sized,
{
    let x = chart.point();
    let d = chart.dim();
    let h: Vec<f64> = x
        .iter()
        .map(|v| {
            if *v == 0.0 {
                LB_STEP
            } else {
                LB_STEP * v.abs()
            }
        })
        .collect();
    let flux = |point: &[f64], i: usize| -> Result<f64> {
        chart.check_inside(point)?;
        let g = metric_field(point)?;
        if g.dim() != d {
            return Err(Error::domain("metric dimension does not match the chart"));
        }
        let inv = g.inverse()?;
        let grad = rho.gradient(point, &h);
        let vol = g.det().sqrt();
        Ok(vol * (0..d).map(|j| inv.get(i, j) * grad[j]).sum::<f64>())
    };
    let mut div = 0.0;
    for i in 0..d {
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[i] += h[i];
        down[i] -= h[i];
        div += (flux(&up, i)? - flux(&down, i)?) / (2.0 * h[i]);
    }
    let g = metric_field(x)?;
    let vol = g.det();
    if !(vol > 0.0) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    Ok(div / vol.sqrt())
}

/// Candidate superharmonic functions on the `(λ+, λ-)` chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoKind {
    /// `ρ+ = λ+^k`
    PowerPlus,
    /// `ρ- = λ-^k`
    PowerMinus,
    /// `ρ1 = c1ρ+ + c2ρ-`
    LinearCombo { c1: f64, c2: f64 },
    /// `ρ2 = ρ+ρ-`
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSpec {
    pub kind: RhoKind,
    pub k: f64,
}

impl RhoSpec {
    pub fn new(kind: RhoKind, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "must be finite",
            });
        }
        if let RhoKind::LinearCombo { c1, c2 } = kind {
            check_positive("c1", c1)?;
            check_positive("c2", c2)?;
        }
        Ok(Self { kind, k })
    }

    /// Value at `(λ+, λ-)`.
    pub fn eval(&self, lp: f64, lm: f64) -> f64 {
        let (p, m) = (lp.powf(self.k), lm.powf(self.k));
        match self.kind {
            RhoKind::PowerPlus => p,
            RhoKind::PowerMinus => m,
            RhoKind::LinearCombo { c1, c2 } => c1 * p + c2 * m,
            RhoKind::Product => p * m,
        }
    }

    /// `(∂_{λ+}ρ, ∂_{λ-}ρ)`.
    pub fn grad(&self, lp: f64, lm: f64) -> (f64, f64) {
        let k = self.k;
        let (p, m) = (lp.powf(self.k), lm.powf(self.k));
        let (dp, dm) = (k * p / lp, k * m / lm);
        match self.kind {
            RhoKind::PowerPlus => (dp, 0.0),
            RhoKind::PowerMinus => (0.0, dm),
            RhoKind::LinearCombo { c1, c2 } => (c1 * dp, c2 * dm),
            RhoKind::Product => (dp * m, p * dm),
        }
    }

    /// Admissible open interval for `k` stated for the family:
    /// `(min(0, a−1), max(0, a−1))` for tempered stable, `(−1, 1)` for variance gamma.
    pub fn stated_range(measure: &LevyMeasure) -> Result<(f64, f64)> {
        match (measure.family(), measure.sides()) {
            (Family::Vg, _) => Ok((-1.0, 1.0)),
            (_, Some((plus, minus))) if plus.a == minus.a => {
                let b = plus.a - 1.0;
                Ok((b.min(0.0), b.max(0.0)))
            }
            _ => Err(Error::precondition(
                "superharmonic candidates are only stated for CTS-type (shared a) and variance gamma measures",
            )),
        }
    }

    /// Whether `k` lies in the stated range. `k = 0` is excluded: a constant
    /// `ρ` has `Δρ = 0`, never `< 0`.
    pub fn in_stated_range(&self, measure: &LevyMeasure) -> Result<bool> {
        let (lo, hi) = Self::stated_range(measure)?;
        Ok(self.k > lo && self.k < hi && self.k != 0.0)
    }
}

/// `RhoSpec` on a chart, mapping chart coordinates to `(λ+, λ-)`.
struct ChartedRho<'a> {
    spec: RhoSpec,
    names: &'a [Coordinate],
    base: (f64, f64),
}

impl ChartedRho<'_> {
    fn lambdas(&self, point: &[f64]) -> (f64, f64) {
        let (mut lp, mut lm) = self.base;
        for (c, &v) in self.names.iter().zip(point) {
            match c {
                Coordinate::LambdaPlus => lp = v,
                Coordinate::LambdaMinus => lm = v,
            }
        }
        (lp, lm)
    }
}

impl ScalarField for ChartedRho<'_> {
    fn value(&self, point: &[f64]) -> f64 {
        let (lp, lm) = self.lambdas(point);
        self.spec.eval(lp, lm)
    }

    fn gradient(&self, point: &[f64], _steps: &[f64]) -> Vec<f64> {
        let (lp, lm) = self.lambdas(point);
        let (gp, gm) = self.spec.grad(lp, lm);
        self.names
            .iter()
            .map(|c| match c {
                Coordinate::LambdaPlus => gp,
                Coordinate::LambdaMinus => gm,
            })
            .collect()
    }
}

/// `Δρ` at the measure's `(λ+, λ-)` using the closed-form metric.
pub fn laplace_beltrami_rho(measure: &LevyMeasure, rho: &RhoSpec, horizon: f64) -> Result<f64> {
    let chart = CoordinateChart::lambda(measure)?;
    laplace_beltrami_rho_with(measure, rho, &chart, |point| {
        models::closed_form_fisher_metric(&chart.apply(measure, point)?, horizon)
    })
}

/// `Δρ` on the `(λ+, λ-)` chart with a caller-supplied metric field.
pub fn laplace_beltrami_rho_with<M>(
    measure: &LevyMeasure,
    rho: &RhoSpec,
    chart: &CoordinateChart,
    metric_field: M,
) -> Result<f64>
where
    M: Fn(&[f64]) -> Result<MetricMatrix>,
{
    let base = measure
        .lambdas()
        .ok_or(Error::UnsupportedCoordinate("lambda_plus"))?;
    let field = ChartedRho {
        spec: *rho,
        names: chart.names(),
        base,
    };
    laplace_beltrami(metric_field, &field, chart)
}

/// What to do when `k` is outside the stated range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Refuse with a precondition error.
    #[default]
    Enforce,
    /// Evaluate anyway and flag it in the report.
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub all_negative: bool,
    /// Point with the largest `Δρ` (first in grid order on ties).
    pub worst_point: (f64, f64),
    pub worst_value: f64,
    pub k_in_stated_range: bool,
    /// `((λ+, λ-), Δρ)` in grid order.
    pub values: Vec<((f64, f64), f64)>,
}

/// Evaluates `Δρ` over a `(λ+, λ-)` grid with the closed-form metric of the
/// measure's family.
pub fn superharmonic_scan(
    measure: &LevyMeasure,
    grid: &[(f64, f64)],
    rho: &RhoSpec,
    horizon: f64,
    policy: RangePolicy,
) -> Result<ScanReport> {
    if grid.is_empty() {
        return Err(Error::precondition("the scan grid is empty"));
    }
    let in_range = rho.in_stated_range(measure)?;
    if !in_range && policy == RangePolicy::Enforce {
        let (lo, hi) = RhoSpec::stated_range(measure)?;
        return Err(Error::precondition(alloc::format!(
            "k = {} is outside the stated range ({lo}, {hi}) \\ {{0}} for {}",
            rho.k,
            measure.family()
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &(lp, lm) in grid {
        let m = measure.with_lambdas(lp, lm)?;
        values.push(((lp, lm), laplace_beltrami_rho(&m, rho, horizon)?));
    }
    let mut worst = values[0];
    for &v in &values[1..] {
        if v.1 > worst.1 {
            worst = v;
        }
    }
    Ok(ScanReport {
        all_negative: values.iter().all(|v| v.1 < 0.0),
        worst_point: worst.0,
        worst_value: worst.1,
        k_in_stated_range: in_range,
        values,
    })
}
