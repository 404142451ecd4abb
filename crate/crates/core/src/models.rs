//! Closed forms for the tempered stable families.
//!
//! Two processes of the same family are equivalent only if they share `C±`
//! and `a±`, so every formula here is indexed by the tempering rates
//! `(λ+, λ-)` of `P` and `(λ̃+, λ̃-)` of `Q`. Per side, with `w = (1−α)/2`
//! and `μ = wλ + (1−w)λ̃`:
//!
//! * tempered stable exponent: `CΓ(−a)·(wλ^a + (1−w)λ̃^a − μ^a)`;
//! * tempered stable KL: `CΓ(−a)·((a−1)λ^a − aλ̃λ^{a−1} + λ̃^a)`;
//! * variance gamma exponent: `C·(−w log λ − (1−w) log λ̃ + log μ)`;
//! * variance gamma KL: `C·(λ̃/λ − 1 + log λ − log λ̃)`.

use crate::error::{Error, Result};
use crate::geometry::{ConnectionTensor, MetricMatrix};
use crate::levy::{Family, LevyMeasure, TemperedSide, TAIL_INDEX_POLE_GUARD};
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

/// Euler–Mascheroni constant.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// `Γ(−a)` for `a ∈ (0, 2) \ {1}`, through `Γ(2−a) / ((−a)(1−a))`.
pub fn gamma_neg(a: f64) -> Result<f64> {
    for pole in [0.0, 1.0, 2.0] {
        if (a - pole).abs() < TAIL_INDEX_POLE_GUARD {
            return Err(Error::GammaPole(a));
        }
    }
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::domain(alloc::format!(
            "Γ(−a) is only provided for a ∈ (0, 2), got {a}"
        )));
    }
    Ok(libm::tgamma(2.0 - a) / ((-a) * (1.0 - a)))
}

/// First-order expansion `Γ(−a) ≈ −1/a − γ_E` for small `a`.
pub fn gamma_neg_small_a(a: f64) -> f64 {
    -1.0 / a - EULER_MASCHERONI
}

/// First-order expansion `λ^a ≈ 1 + a log λ` for small `a`.
pub fn power_small_a(lambda: f64, a: f64) -> f64 {
    1.0 + a * lambda.ln()
}

/// Two members of one named family differing only in `λ±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPair {
    family: Family,
    plus: TemperedSide,
    minus: TemperedSide,
    lambda_tilde: (f64, f64),
}

impl FamilyPair {
    /// Pair `(P, Q)`. Fails unless both are named measures with identical
    /// `C±` and `a±`.
    pub fn new(p: &LevyMeasure, q: &LevyMeasure) -> Result<Self> {
        let (plus, minus) = p
            .sides()
            .ok_or_else(|| Error::precondition("closed forms need a named family for P"))?;
        let (qp, qm) = q
            .sides()
            .ok_or_else(|| Error::precondition("closed forms need a named family for Q"))?;
        if !p.same_shape(q) || family_kind(p.family()) != family_kind(q.family()) {
            return Err(Error::precondition(
                "closed forms need two members of one family that differ only in λ±",
            ));
        }
        Ok(Self {
            family: p.family(),
            plus,
            minus,
            lambda_tilde: (qp.lambda, qm.lambda),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> (f64, f64) {
        (self.plus.lambda, self.minus.lambda)
    }

    pub fn lambda_tilde(&self) -> (f64, f64) {
        self.lambda_tilde
    }

    /// `(Q, P)`.
    pub fn swapped(&self) -> Self {
        let (lp, lm) = self.lambda();
        Self {
            family: self.family,
            plus: TemperedSide {
                lambda: self.lambda_tilde.0,
                ..self.plus
            },
            minus: TemperedSide {
                lambda: self.lambda_tilde.1,
                ..self.minus
            },
            lambda_tilde: (lp, lm),
        }
    }

    /// The regularized variance gamma pair with tail index `a` built from a
    /// variance gamma pair.
    pub fn vg_regularization(&self, a: f64) -> Result<Self> {
        if self.family != Family::Vg {
            return Err(Error::precondition(
                "regularization applies to variance gamma pairs",
            ));
        }
        let (lp, lm) = self.lambda();
        let p = LevyMeasure::vg_regularized(self.plus.c, a, lp, lm)?;
        let q =
            LevyMeasure::vg_regularized(self.plus.c, a, self.lambda_tilde.0, self.lambda_tilde.1)?;
        Self::new(&p, &q)
    }

    fn sides(&self) -> [(TemperedSide, f64); 2] {
        [
            (self.plus, self.lambda_tilde.0),
            (self.minus, self.lambda_tilde.1),
        ]
    }
}

/// CTS is GTS with tied parameters and regularized VG is CTS with a small
/// index; all three share the tempered stable formulas.
fn family_kind(f: Family) -> u8 {
    match f {
        Family::Gts | Family::Cts | Family::VgRegularized => 0,
        Family::Vg => 1,
        Family::Generic => 2,
    }
}

fn ts_exponent(side: TemperedSide, lt: f64, w: f64) -> Result<f64> {
    let (c, a, l) = (side.c, side.a, side.lambda);
    if c == 0.0 || l == lt {
        return Ok(0.0);
    }
    let mu = mixture(l, lt, w)?;
    Ok(c * gamma_neg(a)? * (w * l.powf(a) + (1.0 - w) * lt.powf(a) - mu.powf(a)))
}

fn ts_kl(side: TemperedSide, lt: f64) -> Result<f64> {
    let (c, a, l) = (side.c, side.a, side.lambda);
    if c == 0.0 || l == lt {
        return Ok(0.0);
    }
    Ok(c * gamma_neg(a)? * ((a - 1.0) * l.powf(a) - a * lt * l.powf(a - 1.0) + lt.powf(a)))
}

fn vg_exponent(side: TemperedSide, lt: f64, w: f64) -> Result<f64> {
    let (c, l) = (side.c, side.lambda);
    if l == lt {
        return Ok(0.0);
    }
    let mu = mixture(l, lt, w)?;
    Ok(c * (-w * l.ln() - (1.0 - w) * lt.ln() + mu.ln()))
}

fn vg_kl(side: TemperedSide, lt: f64) -> f64 {
    let (c, l) = (side.c, side.lambda);
    if l == lt {
        return 0.0;
    }
    c * (lt / l - 1.0 + l.ln() - lt.ln())
}

fn mixture(l: f64, lt: f64, w: f64) -> Result<f64> {
    let mu = w * l + (1.0 - w) * lt;
    if mu > 0.0 {
        Ok(mu)
    } else {
        Err(Error::domain(alloc::format!(
            "tempering mixture (1−α)/2·λ + (1+α)/2·λ̃ = {mu} is not positive"
        )))
    }
}

/// `Δ^{(α)}_T` of a pair in closed form (jump term only; the families have `σ = 0`).
pub fn closed_form_delta(pair: &FamilyPair, alpha: f64, horizon: f64) -> Result<f64> {
    crate::error::check_positive("T", horizon)?;
    let w = 0.5 * (1.0 - alpha);
    let mut total = 0.0;
    for (side, lt) in pair.sides() {
        total += match pair.family {
            Family::Vg => vg_exponent(side, lt, w)?,
            _ => ts_exponent(side, lt, w)?,
        };
    }
    Ok(horizon * total)
}

/// `KL(P‖Q)` of a pair in closed form.
pub fn closed_form_kl(pair: &FamilyPair, horizon: f64) -> Result<f64> {
    crate::error::check_positive("T", horizon)?;
    let mut total = 0.0;
    for (side, lt) in pair.sides() {
        total += match pair.family {
            Family::Vg => vg_kl(side, lt),
            _ => ts_kl(side, lt)?,
        };
    }
    Ok(horizon * total)
}

/// `D^{(α)}(P‖Q)` from the family's closed form. `α = −1` is the KL form,
/// `α = +1` the KL form with `P` and `Q` exchanged.
pub fn closed_form_alpha_divergence(pair: &FamilyPair, alpha: f64, horizon: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be finite",
        });
    }
    if alpha == -1.0 {
        return closed_form_kl(pair, horizon);
    }
    if alpha == 1.0 {
        return closed_form_kl(&pair.swapped(), horizon);
    }
    let delta = closed_form_delta(pair, alpha, horizon)?;
    Ok(4.0 / (1.0 - alpha * alpha) * -(-delta).exp_m1())
}

/// Closed form with the regularized variance gamma (small tail index `a`)
/// pair, i.e. the tempered stable formula evaluated at that index.
pub fn vg_regularized_divergence(pair: &FamilyPair, alpha: f64, horizon: f64) -> Result<f64> {
    if pair.family != Family::VgRegularized {
        return Err(Error::precondition(
            "expected a regularized variance gamma pair (see FamilyPair::vg_regularization)",
        ));
    }
    closed_form_alpha_divergence(pair, alpha, horizon)
}

fn side_metric(family: Family, side: TemperedSide, horizon: f64) -> Result<f64> {
    let (c, a, l) = (side.c, side.a, side.lambda);
    Ok(match family {
        Family::Vg => horizon * c / (l * l),
        _ => horizon * c * libm::tgamma(2.0 - a) / l.powf(2.0 - a),
    })
}

fn side_connection(family: Family, side: TemperedSide, alpha: f64, horizon: f64) -> Result<f64> {
    let (c, a, l) = (side.c, side.a, side.lambda);
    Ok(match family {
        Family::Vg => -(1.0 - alpha) * horizon * c / (l * l * l),
        _ => -0.5 * (1.0 - alpha) * horizon * c * libm::tgamma(3.0 - a) / l.powf(3.0 - a),
    })
}

fn named_sides(measure: &LevyMeasure) -> Result<(TemperedSide, TemperedSide)> {
    measure
        .sides()
        .ok_or(Error::UnsupportedCoordinate("lambda_plus"))
}

/// Fisher metric in the `(λ+, λ-)` chart. Diagonal with entries
/// `TC±Γ(2−a±)/λ±^{2−a±}` (tempered stable) or `TC/λ±²` (variance gamma).
pub fn closed_form_fisher_metric(measure: &LevyMeasure, horizon: f64) -> Result<MetricMatrix> {
    crate::error::check_positive("T", horizon)?;
    let (plus, minus) = named_sides(measure)?;
    let f = measure.family();
    Ok(MetricMatrix::diagonal(
        &[
            side_metric(f, plus, horizon)?,
            side_metric(f, minus, horizon)?,
        ],
        horizon,
    ))
}

/// α-connection in the `(λ+, λ-)` chart; only `Γ_{λ±λ±,λ±}` are non-zero.
pub fn closed_form_alpha_connection(
    measure: &LevyMeasure,
    alpha: f64,
    horizon: f64,
) -> Result<ConnectionTensor> {
    crate::error::check_positive("T", horizon)?;
    let (plus, minus) = named_sides(measure)?;
    let f = measure.family();
    let mut t = ConnectionTensor::zeros(2, alpha);
    t.set(0, 0, 0, side_connection(f, plus, alpha, horizon)?);
    t.set(1, 1, 1, side_connection(f, minus, alpha, horizon)?);
    Ok(t)
}

/// Unnormalized Jeffreys prior `√det g` in the `(λ+, λ-)` chart:
/// `TCΓ(2−a)/√((λ+λ-)^{2−a})` for CTS and `TC/(λ+λ-)` for variance gamma.
pub fn closed_form_jeffreys(measure: &LevyMeasure, horizon: f64) -> Result<f64> {
    crate::error::check_positive("T", horizon)?;
    let (plus, minus) = named_sides(measure)?;
    let prior = match measure.family() {
        Family::Vg => horizon * plus.c / (plus.lambda * minus.lambda),
        Family::Cts | Family::VgRegularized => {
            let a = plus.a;
            horizon * plus.c * libm::tgamma(2.0 - a)
                / (plus.lambda * minus.lambda).powf(2.0 - a).sqrt()
        }
        _ => {
            let g = closed_form_fisher_metric(measure, horizon)?;
            (g.get(0, 0) * g.get(1, 1)).sqrt()
        }
    };
    if prior > 0.0 && prior.is_finite() {
        Ok(prior)
    } else {
        Err(Error::domain(
            "the Fisher metric is not positive definite at this point",
        ))
    }
}
