use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use super::measure::LevyMeasure;
use super::model::{compensated_exp, LevyModel};
use crate::error::{check_positive, Error, Result};
use crate::quadrature::{self, Integral, QuadratureConfig, TailDecay};

/// Relative tolerance for `σ_P = σ_Q`.
const SIGMA_MATCH_TOL: f64 = 1e-12;

/// `ψ = log(dν_P/dν_Q)`.
///
/// Members of one named family differing only in `λ±` have
/// `ψ(x) = −(λ+ − λ̃+)x` on `x > 0` and `−(λ- − λ̃-)|x|` on `x < 0`; anything
/// else goes through the ratio of the two densities.
#[derive(Debug, Clone)]
pub enum RnDerivative {
    Tempering { plus: f64, minus: f64 },
    General { p: LevyMeasure, q: LevyMeasure },
}

impl RnDerivative {
    pub fn new(p: &LevyMeasure, q: &LevyMeasure) -> Self {
        if p.same_shape(q) {
            let (lp, lm) = p.lambdas().expect("named family");
            let (qp, qm) = q.lambdas().expect("named family");
            RnDerivative::Tempering {
                plus: lp - qp,
                minus: lm - qm,
            }
        } else {
            RnDerivative::General {
                p: p.clone(),
                q: q.clone(),
            }
        }
    }

    /// `ψ(x)`; `±∞` where exactly one density vanishes, `0` where both do.
    #[inline]
    pub fn psi(&self, x: f64) -> f64 {
        match self {
            RnDerivative::Tempering { plus, minus } => {
                if x > 0.0 {
                    -plus * x
                } else {
                    minus * x
                }
            }
            RnDerivative::General { p, q } => {
                let (lp, lq) = (p.log_density_at(x), q.log_density_at(x));
                match (lp.is_finite(), lq.is_finite()) {
                    (true, true) => lp - lq,
                    (false, false) => 0.0,
                    (true, false) => f64::INFINITY,
                    (false, true) => f64::NEG_INFINITY,
                }
            }
        }
    }
}

/// Outcome of the equivalence test for two Lévy processes.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub sigma_match: bool,
    /// `∫(e^{ψ/2} − 1)² ν_Q(dx)`, `+∞` when the quadrature diverges.
    pub hellinger_integral: f64,
    pub hellinger_finite: bool,
    /// The measures charge the same sets.
    pub absolutely_continuous: bool,
    /// `γ_P − γ_Q − ∫_{−1}^{1} x(ν_P − ν_Q)(dx)` (only when `σ = 0`).
    pub drift_condition_residual: Option<f64>,
    pub reasons: Vec<String>,
}

/// Both measures charge the same sets, judged from the side structure of
/// named families or from the zero pattern of the densities on a log grid.
fn mutually_absolutely_continuous(p: &LevyMeasure, q: &LevyMeasure) -> bool {
    if let (Some((pp, pm)), Some((qp, qm))) = (p.sides(), q.sides()) {
        return (pp.c > 0.0) == (qp.c > 0.0) && (pm.c > 0.0) == (qm.c > 0.0);
    }
    (-60..=40).all(|k| {
        let r = 10f64.powf(k as f64 / 10.0);
        [r, -r]
            .iter()
            .all(|&x| (p.density_at(x) > 0.0) == (q.density_at(x) > 0.0))
    })
}

/// `(√ν_P − √ν_Q)²` written as `(e^{ψ/2} − 1)²ν_Q`.
fn hellinger_density(psi: &RnDerivative, p: &LevyMeasure, q: &LevyMeasure, x: f64) -> f64 {
    let nq = q.density_at(x);
    if nq == 0.0 {
        return p.density_at(x);
    }
    let s = psi.psi(x);
    if s == f64::NEG_INFINITY {
        return nq;
    }
    let e = (0.5 * s).exp_m1();
    e * e * nq
}

fn hellinger_integral(p: &LevyMeasure, q: &LevyMeasure, cfg: &QuadratureConfig) -> Result<f64> {
    let psi = RnDerivative::new(p, q);
    let tails = p.tail_decay().slowest(q.tail_decay());
    let result = quadrature::integrate_line(|x| hellinger_density(&psi, p, q, x), tails, cfg);
    match result {
        Ok(i) if i.value.is_finite() && i.value <= 1.0 / cfg.abs_tol => Ok(i.value),
        Ok(_) | Err(Error::Divergent(_)) | Err(Error::QuadratureNonConvergence { .. }) => {
            Ok(f64::INFINITY)
        }
        Err(e) => Err(e),
    }
}

/// `∫_{−1}^{1} x(ν_P − ν_Q)(dx)`, evaluated as `∫ x·(e^ψ − 1)·ν_Q` where
/// both densities are positive.
pub(crate) fn compensator_difference(
    p: &LevyMeasure,
    q: &LevyMeasure,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let psi = RnDerivative::new(p, q);
    quadrature::integrate_unit_window(
        |x| {
            let nq = q.density_at(x);
            if nq == 0.0 {
                return x * p.density_at(x);
            }
            x * psi.psi(x).exp_m1() * nq
        },
        cfg,
    )
}

/// Checks the measure-level equivalence conditions needed by the divergence
/// and geometry code: mutual absolute continuity and a finite Hellinger integral.
pub(crate) fn ensure_measures_equivalent(
    p: &LevyMeasure,
    q: &LevyMeasure,
    cfg: &QuadratureConfig,
) -> Result<()> {
    if p.same_shape(q) || (p.is_zero() && q.is_zero()) {
        return Ok(());
    }
    if let (Some(_), Some(_)) = (p.sides(), q.sides()) {
        return Err(Error::precondition(
            "the Lévy measures are not equivalent: named families must share C± and a± and differ only in λ±",
        ));
    }
    if !mutually_absolutely_continuous(p, q) {
        return Err(Error::precondition(
            "the Lévy measures are not mutually absolutely continuous",
        ));
    }
    if !hellinger_integral(p, q, cfg)?.is_finite() {
        return Err(Error::precondition(
            "the Hellinger integral ∫(e^{ψ/2} − 1)² ν_Q(dx) is infinite",
        ));
    }
    Ok(())
}

fn sigma_match(p: &LevyModel, q: &LevyModel) -> bool {
    (p.sigma() - q.sigma()).abs() <= SIGMA_MATCH_TOL * p.sigma().max(q.sigma())
}

/// Sato's conditions for `P` and `Q` to be mutually absolutely continuous
/// on every finite horizon. Violations are reported, not raised.
pub fn check_equivalence(
    p: &LevyModel,
    q: &LevyModel,
    cfg: &QuadratureConfig,
) -> Result<EquivalenceReport> {
    cfg.validate()?;
    let mut reasons = Vec::new();
    let sigma_match = sigma_match(p, q);
    if !sigma_match {
        reasons.push(alloc::format!(
            "diffusion coefficients differ: σ_P = {}, σ_Q = {}",
            p.sigma(),
            q.sigma()
        ));
    }
    let (np, nq) = (p.measure(), q.measure());
    let absolutely_continuous = mutually_absolutely_continuous(np, nq);
    if !absolutely_continuous {
        reasons.push(String::from(
            "the Lévy measures do not charge the same sets",
        ));
    }
    let hellinger = if np.is_zero() && nq.is_zero() {
        0.0
    } else {
        hellinger_integral(np, nq, cfg)?
    };
    let hellinger_finite = hellinger.is_finite();
    if !hellinger_finite {
        reasons.push(String::from(
            "the Hellinger integral ∫(e^{ψ/2} − 1)² ν_Q(dx) diverges",
        ));
    }

    let mut drift_condition_residual = None;
    let mut drift_ok = true;
    if sigma_match && p.sigma() == 0.0 && hellinger_finite && absolutely_continuous {
        let comp = compensator_difference(np, nq, cfg)?;
        let residual = p.gamma() - q.gamma() - comp.value;
        let tol = 1e-8 * p.gamma().abs().max(q.gamma().abs()).max(1.0) + 10.0 * comp.abs_error;
        drift_ok = residual.abs() <= tol;
        if !drift_ok {
            reasons.push(alloc::format!(
                "σ = 0 requires γ_P − γ_Q = ∫_{{−1}}^{{1}} x(ν_P − ν_Q)(dx) = {:e}, but the residual is {:e} (γ_Q = {:e} would satisfy it)",
                comp.value,
                residual,
                p.gamma() - comp.value
            ));
        }
        drift_condition_residual = Some(residual);
    }

    Ok(EquivalenceReport {
        equivalent: sigma_match && absolutely_continuous && hellinger_finite && drift_ok,
        sigma_match,
        hellinger_integral: hellinger,
        hellinger_finite,
        absolutely_continuous,
        drift_condition_residual,
        reasons,
    })
}

/// `ψ(x) = log(dν_P/dν_Q)(x)`.
pub fn log_rn_derivative(p: &LevyModel, q: &LevyModel, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain("ψ is defined on ℝ \\ {0} only"));
    }
    let (np, nq) = (p.measure(), q.measure());
    if let (Some(_), Some(_)) = (np.sides(), nq.sides()) {
        if !np.same_shape(nq) {
            return Err(Error::precondition(
                "the Lévy measures are not equivalent: named families must share C± and a±",
            ));
        }
    }
    let psi = RnDerivative::new(np, nq).psi(x);
    if psi.is_finite() {
        Ok(psi)
    } else {
        Err(Error::precondition(alloc::format!(
            "the Lévy measures are not mutually absolutely continuous at x = {x}"
        )))
    }
}

/// `η = (γ_P − γ_Q − ∫_{−1}^{1} x(ν_P − ν_Q)(dx)) / σ²`.
pub fn eta(p: &LevyModel, q: &LevyModel, cfg: &QuadratureConfig) -> Result<f64> {
    if !sigma_match(p, q) {
        return Err(Error::precondition("η needs σ_P = σ_Q"));
    }
    if p.sigma() == 0.0 {
        return Err(Error::precondition("η is undefined for σ = 0"));
    }
    let (np, nq) = (p.measure(), q.measure());
    ensure_measures_equivalent(np, nq, cfg)?;
    let comp = if np.is_zero() && nq.is_zero() {
        0.0
    } else {
        compensator_difference(np, nq, cfg)?.value
    };
    Ok((p.gamma() - q.gamma() - comp) / (p.sigma() * p.sigma()))
}

/// Triplet `(σ_U, ν_U, γ_U)` of `U_t = log(dP/dQ)|_t` under `Q`, with
/// `ν_U = ν_Q∘ψ^{-1}` realized by change of variables against `ν_Q`.
#[derive(Debug, Clone)]
pub struct UTriplet {
    pub sigma_u: f64,
    pub gamma_u: f64,
    psi: RnDerivative,
    p: LevyMeasure,
    q: LevyMeasure,
    cfg: QuadratureConfig,
}

/// Builds the triplet of the log-likelihood-ratio process.
pub fn u_triplet(p: &LevyModel, q: &LevyModel, cfg: &QuadratureConfig) -> Result<UTriplet> {
    let eta = if p.sigma() == 0.0 && q.sigma() == 0.0 {
        0.0
    } else {
        eta(p, q, cfg)?
    };
    let (np, nq) = (p.measure().clone(), q.measure().clone());
    ensure_measures_equivalent(&np, &nq, cfg)?;
    let mut u = UTriplet {
        sigma_u: p.sigma() * eta,
        gamma_u: 0.0,
        psi: RnDerivative::new(&np, &nq),
        p: np,
        q: nq,
        cfg: *cfg,
    };
    // γ_U = −(ση)²/2 − ∫(e^y − 1 − y𝟙_{|y|≤1}) ν_U(dy)
    let jumps = u.integrate_with_tails(
        |y| {
            let w = Complex64::new(y, 0.0);
            compensated_exp(w, y.abs() <= 1.0).re
        },
        u.mixed_tails(1.0)?,
    )?;
    u.gamma_u = -0.5 * u.sigma_u * u.sigma_u - jumps.value;
    Ok(u)
}

impl UTriplet {
    /// `∫ f(y) ν_U(dy) = ∫ f(ψ(x)) ν_Q(dx)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F) -> Result<Integral> {
        let tails = self.p.tail_decay().slowest(self.q.tail_decay());
        self.integrate_with_tails(f, tails)
    }

    fn integrate_with_tails<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        tails: TailDecay,
    ) -> Result<Integral> {
        if self.q.is_zero() {
            return Ok(Integral::default());
        }
        quadrature::integrate_line(
            |x| {
                let nq = self.q.density_at(x);
                if nq == 0.0 {
                    0.0
                } else {
                    f(self.psi.psi(x)) * nq
                }
            },
            tails,
            &self.cfg,
        )
    }

    /// Tail rates of `e^{wψ}ν_Q = ν_P^w ν_Q^{1−w}`.
    fn mixed_tails(&self, w: f64) -> Result<TailDecay> {
        let (tp, tq) = (self.p.tail_decay(), self.q.tail_decay());
        let mix = |a: Option<f64>, b: Option<f64>| -> Result<Option<f64>> {
            match (a, b) {
                (Some(a), Some(b)) => {
                    let rate = (w * a + (1.0 - w) * b).min(a).min(b);
                    if rate > 0.0 {
                        Ok(Some(rate))
                    } else {
                        Err(Error::Divergent(alloc::format!(
                            "∫ e^{{{w}ψ}} ν_Q diverges: mixed tail rate {rate} is not positive"
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

    /// `Φ_t(z; ξ_U)` for complex `z`, through the pushforward.
    pub fn exponent(&self, z: Complex64, t: f64) -> Result<Complex64> {
        check_positive("t", t)?;
        let i = Complex64::new(0.0, 1.0);
        // e^{izy} = e^{-Im(z)·y}·(oscillation); growth in ψ sets the tails
        let tails = self.mixed_tails(-z.im)?;
        let integrand = |y: f64| compensated_exp(i * z * y, y.abs() <= 1.0);
        let re = self.integrate_with_tails(|y| integrand(y).re, tails)?;
        let im = self.integrate_with_tails(|y| integrand(y).im, tails)?;
        let s = self.sigma_u;
        Ok(t * (-0.5 * s * s * z * z + i * self.gamma_u * z + Complex64::new(re.value, im.value)))
    }

    pub fn rn_derivative(&self) -> &RnDerivative {
        &self.psi
    }
}
