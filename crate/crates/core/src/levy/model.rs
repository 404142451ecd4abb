use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::measure::{LevyMeasure, TemperedSide};
use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::models::gamma_neg;
use crate::quadrature::{self, QuadratureConfig, TailDecay};

/// Lévy triplet `(σ, ν, γ)`.
#[derive(Debug, Clone)]
pub struct LevyModel {
    sigma: f64,
    gamma: f64,
    measure: LevyMeasure,
    martingale: bool,
}

impl LevyModel {
    pub fn new(sigma: f64, gamma: f64, measure: LevyMeasure) -> Result<Self> {
        check_nonnegative("sigma", sigma)?;
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite",
            });
        }
        Ok(Self {
            sigma,
            gamma,
            measure,
            martingale: false,
        })
    }

    /// `(0, ν, 0)`.
    pub fn pure_jump(measure: LevyMeasure) -> Self {
        Self {
            sigma: 0.0,
            gamma: 0.0,
            measure,
            martingale: false,
        }
    }

    /// Brownian motion with drift, `(σ, 0, γ)`.
    pub fn diffusion(sigma: f64, gamma: f64) -> Result<Self> {
        Self::new(sigma, gamma, LevyMeasure::zero())
    }

    /// `(σ, ν, γ)` with `γ` fixed by the martingale condition `Φ_t(−i) = 0`.
    pub fn with_martingale_drift(
        sigma: f64,
        measure: LevyMeasure,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let gamma = martingale_drift(sigma, &measure, cfg)?;
        let mut model = Self::new(sigma, gamma, measure)?;
        model.martingale = true;
        Ok(model)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    /// Whether `γ` was set by [`LevyModel::with_martingale_drift`].
    pub fn is_martingale(&self) -> bool {
        self.martingale
    }

    /// Same `σ` and `γ` with another measure. A martingale model recomputes
    /// its drift for the new measure.
    pub fn with_measure(&self, measure: LevyMeasure, cfg: &QuadratureConfig) -> Result<Self> {
        if self.martingale {
            Self::with_martingale_drift(self.sigma, measure, cfg)
        } else {
            Self::new(self.sigma, self.gamma, measure)
        }
    }
}

/// Lévy density `dν/dx` of the model at `x ≠ 0`.
pub fn levy_density(model: &LevyModel, x: f64) -> Result<f64> {
    model.measure.density(x)
}

/// A complex integral with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexIntegral {
    pub value: Complex64,
    pub abs_error: f64,
    pub truncation_bound: f64,
}

/// `e^w − 1 − w·𝟙_compensate`, accurate for small `|w|`.
#[inline]
pub(crate) fn compensated_exp(w: Complex64, compensate: bool) -> Complex64 {
    if w.norm_sqr() < 1e-4 {
        let tail =
            w * w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w * (1.0 / 120.0 + w / 720.0))));
        if compensate {
            tail
        } else {
            w + tail
        }
    } else if compensate {
        w.exp() - 1.0 - w
    } else {
        w.exp() - 1.0
    }
}

/// Tail rates of `e^{-vx}·ν` (the damping of `e^{izx}` for `z = u + iv`).
pub(crate) fn shifted_tails(tails: TailDecay, v: f64) -> Result<TailDecay> {
    let shift = |rate: Option<f64>, delta: f64| -> Result<Option<f64>> {
        match rate {
            Some(r) if r.is_infinite() => Ok(Some(r)),
            Some(r) if r + delta > 0.0 => Ok(Some(r + delta)),
            Some(r) => Err(Error::Divergent(alloc::format!(
                "exponential moment of order {} is infinite for tail rate {r}",
                -delta
            ))),
            None => Ok(None),
        }
    };
    Ok(TailDecay::new(
        shift(tails.plus, v)?,
        shift(tails.minus, -v)?,
    ))
}

/// `∫(e^{izx} − 1 − izx𝟙_{|x|≤1}) ν(dx)` for complex `z`, by quadrature.
///
/// For `z = u + iv` the factor `e^{-vx}` shifts the tail rates; a side whose
/// shifted rate is not positive makes the integral diverge.
pub fn jump_integral(
    measure: &LevyMeasure,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<ComplexIntegral> {
    if measure.is_zero() || z == Complex64::new(0.0, 0.0) {
        return Ok(ComplexIntegral::default());
    }
    let tails = shifted_tails(measure.tail_decay(), z.im)?;
    let integrand = |x: f64| -> Complex64 {
        let w = Complex64::new(0.0, x) * z;
        compensated_exp(w, x.abs() <= 1.0) * measure.density_at(x)
    };
    let re = quadrature::integrate_line(|x| integrand(x).re, tails, cfg)?;
    let im = quadrature::integrate_line(|x| integrand(x).im, tails, cfg)?;
    Ok(ComplexIntegral {
        value: Complex64::new(re.value, im.value),
        abs_error: re.abs_error + im.abs_error,
        truncation_bound: re.truncation_bound + im.truncation_bound,
    })
}

/// `Φ_t(z) = −tσ²z²/2 + itγz + t∫(e^{izx} − 1 − izx𝟙_{|x|≤1}) ν(dx)` for complex `z`.
pub fn characteristic_exponent_complex(
    model: &LevyModel,
    z: Complex64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_positive("t", t)?;
    let i = Complex64::new(0.0, 1.0);
    let jumps = jump_integral(&model.measure, z, cfg)?;
    Ok(t * (-0.5 * model.sigma * model.sigma * z * z + i * model.gamma * z + jumps.value))
}

/// Characteristic exponent `Φ_t(z)` at real `z`, by adaptive quadrature.
pub fn characteristic_exponent(
    model: &LevyModel,
    z: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    characteristic_exponent_complex(model, Complex64::new(z, 0.0), t, cfg)
}

/// `e^x − 1 − x`, accurate near 0.
#[inline]
pub(crate) fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        x * x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x * (1.0 / 120.0 + x / 720.0))))
    } else {
        x.exp_m1() - x
    }
}

/// `γ = −σ²/2 − ∫(e^x − 1 − x𝟙_{|x|≤1}) ν(dx)`, the drift making `e^{X_t}` a martingale.
pub fn martingale_drift(sigma: f64, measure: &LevyMeasure, cfg: &QuadratureConfig) -> Result<f64> {
    check_nonnegative("sigma", sigma)?;
    if measure.is_zero() {
        return Ok(-0.5 * sigma * sigma);
    }
    if let Some((plus, _)) = measure.sides() {
        if plus.c > 0.0 && plus.lambda <= 1.0 {
            return Err(Error::Divergent(alloc::format!(
                "∫_{{x>1}} e^x ν(dx) is infinite for λ+ = {} ≤ 1",
                plus.lambda
            )));
        }
    }
    let tails = shifted_tails(measure.tail_decay(), -1.0)?;
    let jumps = quadrature::integrate_line(
        |x| {
            let core = if x.abs() <= 1.0 {
                expm1_minus_x(x)
            } else {
                x.exp_m1()
            };
            core * measure.density_at(x)
        },
        tails,
        cfg,
    )?;
    Ok(-0.5 * sigma * sigma - jumps.value)
}

/// One side of a named measure in closed form:
/// `S(z) = ∫_0^∞ (e^{izy} − 1 − izy𝟙_{y≤1}) C e^{-λy} y^{-1-a} dy`.
#[derive(Debug, Clone, Copy)]
struct AnalyticSide {
    side: TemperedSide,
    /// `CΓ(−a)λ^a` (unused for `a = 0`).
    scale: f64,
    /// `−∫_0^1 yν` for `a < 1`, `+∫_1^∞ yν` for `a > 1`.
    shift: f64,
}

impl AnalyticSide {
    fn new(side: TemperedSide, cfg: &QuadratureConfig) -> Result<Self> {
        if side.c == 0.0 {
            return Ok(Self {
                side,
                scale: 0.0,
                shift: 0.0,
            });
        }
        let (c, a, l) = (side.c, side.a, side.lambda);
        let (scale, shift) = if a == 0.0 {
            (0.0, -c * -(-l).exp_m1() / l)
        } else if a < 1.0 {
            let inner = quadrature::integrate_half_line(
                |y| if y <= 1.0 { y * side.density(y) } else { 0.0 },
                Some(l),
                cfg,
            )?;
            (c * gamma_neg(a)? * l.powf(a), -inner.value)
        } else {
            let outer = quadrature::integrate_half_line(
                |y| if y > 1.0 { y * side.density(y) } else { 0.0 },
                Some(l),
                cfg,
            )?;
            (c * gamma_neg(a)? * l.powf(a), outer.value)
        };
        Ok(Self { side, scale, shift })
    }

    fn eval(&self, z: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        if self.side.c == 0.0 || z == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (a, l) = (self.side.a, self.side.lambda);
        let u = z / l;
        // log(1 − iz/λ), exact for real z
        let log_ratio = Complex64::new(0.5 * (u * u).ln_1p(), (-u).atan());
        let body = if a == 0.0 {
            -self.side.c * log_ratio
        } else {
            let e = compensated_exp(a * log_ratio, false);
            if a < 1.0 {
                self.scale * e
            } else {
                self.scale * (e + i * a * u)
            }
        };
        body + i * z * self.shift
    }
}

/// Characteristic exponent evaluator for repeated calls.
///
/// Named families use their closed-form exponents (with the truncation
/// compensator evaluated once by quadrature); generic measures fall back to
/// [`characteristic_exponent`].
#[derive(Debug, Clone)]
pub struct ExponentEvaluator<'a> {
    model: &'a LevyModel,
    cfg: QuadratureConfig,
    analytic: Option<(AnalyticSide, AnalyticSide)>,
}

impl<'a> ExponentEvaluator<'a> {
    pub fn new(model: &'a LevyModel, cfg: &QuadratureConfig) -> Result<Self> {
        let analytic = match model.measure.sides() {
            Some((plus, minus)) => Some((
                AnalyticSide::new(plus, cfg)?,
                AnalyticSide::new(minus, cfg)?,
            )),
            None => None,
        };
        Ok(Self {
            model,
            cfg: *cfg,
            analytic,
        })
    }

    /// Closed-form evaluation is available.
    pub fn is_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn eval(&self, z: f64, t: f64) -> Result<Complex64> {
        match &self.analytic {
            Some((plus, minus)) => {
                let s = self.model.sigma;
                let gauss = Complex64::new(-0.5 * s * s * z * z, self.model.gamma * z);
                Ok(t * (gauss + plus.eval(z) + minus.eval(-z)))
            }
            None => characteristic_exponent(self.model, z, t, &self.cfg),
        }
    }
}
