//! `Δ^{(α)}_T` and α-divergences between equivalent Lévy processes.
//!
//! With `r = dν_P/dν_Q = e^ψ` and `w = (1−α)/2`,
//!
//! ```text
//! Δ = ((1−α²)/4)·(T/2σ²)·d² + T∫(w·r + (1−w) − r^w) ν_Q(dx)
//! d = γ_P − γ_Q − ∫_{−1}^{1} x(ν_P − ν_Q)(dx)        (general form)
//! d = −∫(e^x − 1)(ν_P − ν_Q)(dx)                     (martingale form)
//! ```
//!
//! and `D^{(α)} = 4/(1−α²)·(1 − e^{−Δ})` for `α ≠ ±1`. The drift part is
//! absent when `σ = 0`. At `α = −1` the divergence is the Kullback–Leibler
//! divergence; at `α = +1` it is the same with `P` and `Q` exchanged.

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::error::{check_positive, Error, Result};
use crate::levy::{self, LevyMeasure, LevyModel, RnDerivative};
use crate::models::{self, FamilyPair};
use crate::quadrature::{self, Integral, QuadratureConfig, TailDecay};

/// Below this `|ψ|` the jump integrands switch to their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// `|Φ_T(−i)|` tolerated for a model used with the martingale form.
pub const MARTINGALE_TOL: f64 = 1e-8;

/// Which evaluation route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodPreference {
    /// Closed form when both models are `σ = 0` members of one named family
    /// differing only in `λ±` and `α ∈ [−1, 1]`; quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
}

/// Route actually taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRequest {
    pub alpha: f64,
    pub horizon: f64,
    pub use_martingale_form: bool,
    pub quadrature: QuadratureConfig,
    pub method: MethodPreference,
}

impl DivergenceRequest {
    pub fn new(alpha: f64, horizon: f64) -> Self {
        Self {
            alpha,
            horizon,
            use_martingale_form: false,
            quadrature: QuadratureConfig::default(),
            method: MethodPreference::Auto,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_method(mut self, method: MethodPreference) -> Self {
        self.method = method;
        self
    }

    pub fn with_martingale_form(mut self, on: bool) -> Self {
        self.use_martingale_form = on;
        self
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quadrature = cfg;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must be finite",
            });
        }
        if self.alpha.abs() > 1.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must lie in [-1, 1]",
            });
        }
        check_positive("T", self.horizon)?;
        self.quadrature.validate()
    }

    fn is_boundary(&self) -> bool {
        self.alpha.abs() == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    pub value: f64,
    /// `Δ^{(α)}_T`; zero at `α = ±1`.
    pub delta: f64,
    /// Drift part (of `Δ`, or of the KL form at `α = ±1`).
    pub drift_term: f64,
    /// Jump part (of `Δ`, or of the KL form at `α = ±1`).
    pub jump_term: f64,
    pub method: Method,
    /// Quadrature error estimate carried by `value` (zero for closed forms).
    pub abs_error: f64,
}

/// `w·e^ψ + (1−w) − e^{wψ}`, i.e. `w·r + (1−w) − r^w`.
#[inline]
pub fn alpha_integrand(psi: f64, w: f64) -> f64 {
    if psi.abs() < SERIES_THRESHOLD {
        let p2 = psi * psi;
        w * (1.0 - w) * p2 / 2.0
            + (w - w * w * w) * p2 * psi / 6.0
            + (w - w * w * w * w) * p2 * p2 / 24.0
    } else {
        w * psi.exp_m1() - (w * psi).exp_m1()
    }
}

/// `r log r − r + 1` with `r = e^ψ`.
#[inline]
pub fn kl_integrand(psi: f64) -> f64 {
    if psi.abs() < SERIES_THRESHOLD {
        let p2 = psi * psi;
        p2 / 2.0 + p2 * psi / 3.0 + p2 * p2 / 8.0
    } else {
        psi * psi.exp() - psi.exp_m1()
    }
}

/// Tail rates of `ν_P^w ν_Q^{1−w}`, the slowest piece of the jump integrand.
fn jump_tails(p: &LevyMeasure, q: &LevyMeasure, w: f64) -> Result<TailDecay> {
    let (tp, tq) = (p.tail_decay(), q.tail_decay());
    let mix = |a: Option<f64>, b: Option<f64>| -> Result<Option<f64>> {
        match (a, b) {
            (Some(a), Some(b)) if a.is_infinite() || b.is_infinite() => Ok(Some(a.min(b))),
            (Some(a), Some(b)) => {
                let rate = (w * a + (1.0 - w) * b).min(a).min(b);
                if rate > 0.0 {
                    Ok(Some(rate))
                } else {
                    Err(Error::Divergent(alloc::format!(
                        "the jump integral diverges for α = {}: mixed tail rate {rate} ≤ 0",
                        1.0 - 2.0 * w
                    )))
                }
            }
            _ => Ok(None),
        }
    };
    Ok(TailDecay::new(
        mix(tp.plus, tq.plus)?,
        mix(tp.minus, tq.minus)?,
    ))
}

fn integrate_against_q<F: Fn(f64) -> f64>(
    p: &LevyMeasure,
    q: &LevyMeasure,
    tails: TailDecay,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if p.is_zero() && q.is_zero() {
        return Ok(Integral::default());
    }
    let psi = RnDerivative::new(p, q);
    quadrature::integrate_line(
        |x| {
            let nq = q.density_at(x);
            if nq == 0.0 {
                0.0
            } else {
                f(psi.psi(x)) * nq
            }
        },
        tails,
        cfg,
    )
}

/// `∫(w·r + (1−w) − r^w) ν_Q(dx)` by quadrature.
pub fn jump_integral_alpha(
    p: &LevyMeasure,
    q: &LevyMeasure,
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let w = 0.5 * (1.0 - alpha);
    integrate_against_q(p, q, jump_tails(p, q, w)?, |s| alpha_integrand(s, w), cfg)
}

/// `∫(r log r − r + 1) ν_Q(dx)` by quadrature.
pub fn jump_integral_kl(
    p: &LevyMeasure,
    q: &LevyMeasure,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    integrate_against_q(p, q, jump_tails(p, q, 1.0)?, kl_integrand, cfg)
}

/// The drift discrepancy `d` of the module docs.
fn drift_discrepancy(p: &LevyModel, q: &LevyModel, req: &DivergenceRequest) -> Result<f64> {
    let (np, nq) = (p.measure(), q.measure());
    if req.use_martingale_form {
        if np.is_zero() && nq.is_zero() {
            return Ok(0.0);
        }
        // −∫(e^x − 1)(ν_P − ν_Q) = −∫(e^x − 1)(e^ψ − 1) ν_Q
        let tails = levy::shifted_tails(jump_tails(np, nq, 1.0)?, -1.0)?;
        let psi = RnDerivative::new(np, nq);
        let i = quadrature::integrate_line(
            |x| {
                let nqx = nq.density_at(x);
                if nqx == 0.0 {
                    x.exp_m1() * np.density_at(x)
                } else {
                    x.exp_m1() * psi.psi(x).exp_m1() * nqx
                }
            },
            tails,
            &req.quadrature,
        )?;
        Ok(-i.value)
    } else {
        let comp = if np.is_zero() && nq.is_zero() {
            0.0
        } else {
            levy::compensator_difference(np, nq, &req.quadrature)?.value
        };
        Ok(p.gamma() - q.gamma() - comp)
    }
}

fn check_pair(p: &LevyModel, q: &LevyModel, req: &DivergenceRequest) -> Result<()> {
    req.validate()?;
    let (sp, sq) = (p.sigma(), q.sigma());
    if (sp - sq).abs() > 1e-12 * sp.max(sq) {
        return Err(Error::precondition(alloc::format!(
            "the processes are not equivalent: σ_P = {sp} differs from σ_Q = {sq}"
        )));
    }
    levy::ensure_measures_equivalent(p.measure(), q.measure(), &req.quadrature)?;
    if req.use_martingale_form {
        for (name, m) in [("P", p), ("Q", q)] {
            let phi = levy::characteristic_exponent_complex(
                m,
                num_complex::Complex64::new(0.0, -1.0),
                req.horizon,
                &req.quadrature,
            )?;
            if phi.norm() > MARTINGALE_TOL {
                return Err(Error::precondition(alloc::format!(
                    "the martingale form needs |Φ_T(−i)| ≤ {MARTINGALE_TOL:e}, but model {name} has {:e}",
                    phi.norm()
                )));
            }
        }
    }
    Ok(())
}

fn closed_form_pair(p: &LevyModel, q: &LevyModel, req: &DivergenceRequest) -> Option<FamilyPair> {
    if req.method != MethodPreference::Auto
        || p.sigma() != 0.0
        || q.sigma() != 0.0
        || !(-1.0..=1.0).contains(&req.alpha)
    {
        return None;
    }
    FamilyPair::new(p.measure(), q.measure()).ok()
}

fn clamp_nonnegative(value: f64, abs_error: f64) -> f64 {
    if value < 0.0 && value >= -(abs_error + 1e-15) {
        0.0
    } else {
        value
    }
}

/// `Δ^{(α)}_T(P‖Q)` with its drift/jump breakdown (`value` is `Δ` itself).
pub fn delta_alpha(
    p: &LevyModel,
    q: &LevyModel,
    req: &DivergenceRequest,
) -> Result<DivergenceResult> {
    check_pair(p, q, req)?;
    let (alpha, horizon) = (req.alpha, req.horizon);
    if req.is_boundary() {
        return Ok(DivergenceResult {
            value: 0.0,
            delta: 0.0,
            drift_term: 0.0,
            jump_term: 0.0,
            method: if closed_form_pair(p, q, req).is_some() {
                Method::ClosedForm
            } else {
                Method::Quadrature
            },
            abs_error: 0.0,
        });
    }
    if let Some(pair) = closed_form_pair(p, q, req) {
        let delta = models::closed_form_delta(&pair, alpha, horizon)?.max(0.0);
        return Ok(DivergenceResult {
            value: delta,
            delta,
            drift_term: 0.0,
            jump_term: delta,
            method: Method::ClosedForm,
            abs_error: 0.0,
        });
    }
    let sigma = p.sigma();
    let drift_term = if sigma > 0.0 {
        let d = drift_discrepancy(p, q, req)?;
        0.25 * (1.0 - alpha * alpha) * horizon / (2.0 * sigma * sigma) * d * d
    } else {
        0.0
    };
    let jumps = jump_integral_alpha(p.measure(), q.measure(), alpha, &req.quadrature)?;
    let abs_error = horizon * jumps.abs_error;
    let jump_term = clamp_nonnegative(horizon * jumps.value, abs_error);
    let delta = drift_term + jump_term;
    Ok(DivergenceResult {
        value: delta,
        delta,
        drift_term,
        jump_term,
        method: Method::Quadrature,
        abs_error,
    })
}

fn kl_divergence(
    p: &LevyModel,
    q: &LevyModel,
    req: &DivergenceRequest,
) -> Result<DivergenceResult> {
    if let Some(pair) = closed_form_pair(p, q, req) {
        let kl = models::closed_form_kl(&pair, req.horizon)?.max(0.0);
        return Ok(DivergenceResult {
            value: kl,
            delta: 0.0,
            drift_term: 0.0,
            jump_term: kl,
            method: Method::ClosedForm,
            abs_error: 0.0,
        });
    }
    let sigma = p.sigma();
    let drift_term = if sigma > 0.0 {
        let d = drift_discrepancy(p, q, req)?;
        req.horizon / (2.0 * sigma * sigma) * d * d
    } else {
        0.0
    };
    let jumps = jump_integral_kl(p.measure(), q.measure(), &req.quadrature)?;
    let abs_error = req.horizon * jumps.abs_error;
    let jump_term = clamp_nonnegative(req.horizon * jumps.value, abs_error);
    Ok(DivergenceResult {
        value: drift_term + jump_term,
        delta: 0.0,
        drift_term,
        jump_term,
        method: Method::Quadrature,
        abs_error,
    })
}

/// `D^{(α)}(P‖Q)`.
pub fn alpha_divergence(
    p: &LevyModel,
    q: &LevyModel,
    req: &DivergenceRequest,
) -> Result<DivergenceResult> {
    check_pair(p, q, req)?;
    if req.alpha == -1.0 {
        return kl_divergence(p, q, req);
    }
    if req.alpha == 1.0 {
        return kl_divergence(q, p, &req.with_alpha(-1.0));
    }
    let delta = delta_alpha(p, q, req)?;
    let scale = 4.0 / (1.0 - req.alpha * req.alpha);
    Ok(DivergenceResult {
        value: scale * -(-delta.delta).exp_m1(),
        abs_error: scale.abs() * delta.abs_error,
        ..delta
    })
}

/// `4/(1−α²)·Δ^{(α)}_T`; at `α = ±1` the limit, which is the KL form.
pub fn linear_alpha_divergence(
    p: &LevyModel,
    q: &LevyModel,
    req: &DivergenceRequest,
) -> Result<f64> {
    if req.is_boundary() {
        return Ok(alpha_divergence(p, q, req)?.value);
    }
    let delta = delta_alpha(p, q, req)?;
    Ok(4.0 / (1.0 - req.alpha * req.alpha) * delta.delta)
}
