use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::quadrature::{self, QuadratureConfig, TailDecay};

/// Largest tail index accepted for the regularized variance gamma measure.
pub const VG_REGULARIZATION_MAX: f64 = 0.1;

/// Distance from `a = 1` below which the tail index is treated as the
/// excluded stable boundary.
pub const TAIL_INDEX_POLE_GUARD: f64 = 1e-8;

/// One half of a tempered-stable-type density, `C·e^{-λr} / r^{1+a}` for `r = |x| > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedSide {
    pub c: f64,
    pub a: f64,
    pub lambda: f64,
}

impl TemperedSide {
    pub fn new(c: f64, a: f64, lambda: f64) -> Self {
        Self { c, a, lambda }
    }

    #[inline]
    pub fn density(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.c * (-self.lambda * r).exp() * r.powf(-1.0 - self.a)
    }

    #[inline]
    pub fn log_density(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.c.ln() - self.lambda * r - (1.0 + self.a) * r.ln()
    }

    /// Same `C` and `a`: the two sides differ at most by exponential tempering.
    pub fn same_shape(&self, other: &TemperedSide) -> bool {
        self.c == other.c && self.a == other.a
    }

    fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }
}

/// Model family tag of a [`LevyMeasure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Gts,
    Cts,
    Vg,
    VgRegularized,
    Generic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gts => "gts",
            Family::Cts => "cts",
            Family::Vg => "vg",
            Family::VgRegularized => "vg_reg",
            Family::Generic => "generic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shared handle to a user-supplied Lévy density `x ↦ dν/dx`.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Lévy measure given only through its density.
///
/// Tail decay rates are optional hints. Without them integrals are
/// truncated at the outer cut and the dropped mass is bounded in the
/// returned [`Integral`](crate::quadrature::Integral).
#[derive(Clone)]
pub struct GenericMeasure {
    density: Option<DensityFn>,
    tails: TailDecay,
    label: String,
}

impl GenericMeasure {
    /// Wraps a density after checking `∫_{|x|≤1} x² ν(dx) < ∞` and
    /// `∫_{|x|>1} ν(dx) < ∞` numerically.
    pub fn new(
        label: impl Into<String>,
        density: DensityFn,
        tails: TailDecay,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let measure = Self {
            density: Some(density),
            tails,
            label: label.into(),
        };
        measure.check_admissible(cfg)?;
        Ok(measure)
    }

    /// The zero measure (a pure diffusion has no jumps).
    pub fn zero() -> Self {
        Self {
            density: None,
            tails: TailDecay::both(f64::INFINITY),
            label: String::from("zero"),
        }
    }

    /// Tempered-stable-shaped density evaluated through the generic
    /// (quadrature-only) code paths. Accepts `C ≥ 0` and `a ∈ [0, 2)`.
    pub fn tempered(
        plus: TemperedSide,
        minus: TemperedSide,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        for side in [plus, minus] {
            check_nonnegative("c", side.c)?;
            check_positive("lambda", side.lambda)?;
            if !(0.0..2.0).contains(&side.a) {
                return Err(Error::InvalidParameter {
                    name: "a",
                    value: side.a,
                    reason: "must lie in [0, 2)",
                });
            }
        }
        if plus.c == 0.0 && minus.c == 0.0 {
            return Ok(Self::zero());
        }
        let density: DensityFn = Arc::new(move |x: f64| {
            if x > 0.0 {
                plus.density(x)
            } else {
                minus.density(-x)
            }
        });
        Self::new(
            "tempered",
            density,
            TailDecay::new(Some(plus.lambda), Some(minus.lambda)),
            cfg,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_none()
    }

    fn density(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d(x))
    }

    fn check_admissible(&self, cfg: &QuadratureConfig) -> Result<()> {
        let small = quadrature::integrate_unit_window(|x| x * x * self.density(x), cfg);
        let large = quadrature::integrate_line(
            |x| if x.abs() > 1.0 { self.density(x) } else { 0.0 },
            self.tails,
            cfg,
        );
        for (what, r) in [("∫_{|x|≤1} x² ν(dx)", small), ("∫_{|x|>1} ν(dx)", large)] {
            match r {
                Ok(i) if i.value.is_finite() && i.value >= -cfg.abs_tol => {}
                Ok(_) | Err(Error::Divergent(_)) | Err(Error::QuadratureNonConvergence { .. }) => {
                    return Err(Error::domain(alloc::format!(
                        "generic Lévy measure `{}` is not admissible: {what} is not finite",
                        self.label
                    )))
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GenericMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericMeasure")
            .field("label", &self.label)
            .field("tails", &self.tails)
            .field("zero", &self.is_zero())
            .finish()
    }
}

/// Lévy measure of a one-dimensional Lévy process.
///
/// Named families all have densities of the form `C±·e^{-λ±|x|}/|x|^{1+a±}`:
///
/// * GTS: independent `(C±, a±, λ±)` with `a± ∈ (0,2)\{1}`;
/// * CTS (CGMY): GTS with `C+ = C-` and `a+ = a-`;
/// * VG: `a = 0`;
/// * regularized VG: CTS with a small tail index `a ∈ (0, 0.1]`.
#[derive(Debug, Clone)]
pub enum LevyMeasure {
    Gts {
        plus: TemperedSide,
        minus: TemperedSide,
    },
    Cts {
        c: f64,
        a: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    },
    Vg {
        c: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    },
    VgRegularized {
        c: f64,
        a: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    },
    Generic(GenericMeasure),
}

fn check_tail_index(value: f64) -> Result<f64> {
    if !(value > 0.0 && value < 2.0) || (value - 1.0).abs() < TAIL_INDEX_POLE_GUARD {
        return Err(Error::InvalidParameter {
            name: "a",
            value,
            reason: "must lie in (0, 2) \\ {1}",
        });
    }
    Ok(value)
}

impl LevyMeasure {
    /// GTS measure. A side with `C = 0` is switched off (one-sided GTS), but
    /// at least one side must carry mass.
    pub fn gts(plus: TemperedSide, minus: TemperedSide) -> Result<Self> {
        for side in [plus, minus] {
            check_nonnegative("c", side.c)?;
            check_tail_index(side.a)?;
            check_positive("lambda", side.lambda)?;
        }
        if plus.c == 0.0 && minus.c == 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                value: 0.0,
                reason: "at least one of C+ and C- must be positive",
            });
        }
        Ok(LevyMeasure::Gts { plus, minus })
    }

    pub fn cts(c: f64, a: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        Ok(LevyMeasure::Cts {
            c: check_positive("c", c)?,
            a: check_tail_index(a)?,
            lambda_plus: check_positive("lambda_plus", lambda_plus)?,
            lambda_minus: check_positive("lambda_minus", lambda_minus)?,
        })
    }

    pub fn vg(c: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        Ok(LevyMeasure::Vg {
            c: check_positive("c", c)?,
            lambda_plus: check_positive("lambda_plus", lambda_plus)?,
            lambda_minus: check_positive("lambda_minus", lambda_minus)?,
        })
    }

    pub fn vg_regularized(c: f64, a: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        if !(a > 0.0 && a <= VG_REGULARIZATION_MAX) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "regularization index must lie in (0, 0.1]",
            });
        }
        Ok(LevyMeasure::VgRegularized {
            c: check_positive("c", c)?,
            a,
            lambda_plus: check_positive("lambda_plus", lambda_plus)?,
            lambda_minus: check_positive("lambda_minus", lambda_minus)?,
        })
    }

    pub fn zero() -> Self {
        LevyMeasure::Generic(GenericMeasure::zero())
    }

    pub fn family(&self) -> Family {
        match self {
            LevyMeasure::Gts { .. } => Family::Gts,
            LevyMeasure::Cts { .. } => Family::Cts,
            LevyMeasure::Vg { .. } => Family::Vg,
            LevyMeasure::VgRegularized { .. } => Family::VgRegularized,
            LevyMeasure::Generic(_) => Family::Generic,
        }
    }

    /// `(positive side, negative side)` for the named families.
    pub fn sides(&self) -> Option<(TemperedSide, TemperedSide)> {
        match *self {
            LevyMeasure::Gts { plus, minus } => Some((plus, minus)),
            LevyMeasure::Cts {
                c,
                a,
                lambda_plus,
                lambda_minus,
            }
            | LevyMeasure::VgRegularized {
                c,
                a,
                lambda_plus,
                lambda_minus,
            } => Some((
                TemperedSide::new(c, a, lambda_plus),
                TemperedSide::new(c, a, lambda_minus),
            )),
            LevyMeasure::Vg {
                c,
                lambda_plus,
                lambda_minus,
            } => Some((
                TemperedSide::new(c, 0.0, lambda_plus),
                TemperedSide::new(c, 0.0, lambda_minus),
            )),
            LevyMeasure::Generic(_) => None,
        }
    }

    /// Tempering rates `(λ+, λ-)` of a named family.
    pub fn lambdas(&self) -> Option<(f64, f64)> {
        self.sides().map(|(p, m)| (p.lambda, m.lambda))
    }

    /// Same family and shared parameters, with new tempering rates.
    pub fn with_lambdas(&self, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        match *self {
            LevyMeasure::Gts { plus, minus } => {
                check_positive("lambda_plus", lambda_plus)?;
                check_positive("lambda_minus", lambda_minus)?;
                Ok(LevyMeasure::Gts {
                    plus: plus.with_lambda(lambda_plus),
                    minus: minus.with_lambda(lambda_minus),
                })
            }
            LevyMeasure::Cts { c, a, .. } => Self::cts(c, a, lambda_plus, lambda_minus),
            LevyMeasure::Vg { c, .. } => Self::vg(c, lambda_plus, lambda_minus),
            LevyMeasure::VgRegularized { c, a, .. } => {
                Self::vg_regularized(c, a, lambda_plus, lambda_minus)
            }
            LevyMeasure::Generic(_) => Err(Error::UnsupportedCoordinate("lambda")),
        }
    }

    /// Both are named families whose sides share `C` and `a`, so they can
    /// differ only through `λ±`.
    pub fn same_shape(&self, other: &LevyMeasure) -> bool {
        match (self.sides(), other.sides()) {
            (Some((p1, m1)), Some((p2, m2))) => p1.same_shape(&p2) && m1.same_shape(&m2),
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LevyMeasure::Generic(g) if g.is_zero())
    }

    /// Lévy density at `x ≠ 0` (no domain check; `x = 0` yields garbage).
    #[inline]
    pub fn density_at(&self, x: f64) -> f64 {
        match self {
            LevyMeasure::Generic(g) => g.density(x),
            named => {
                let (plus, minus) = named.sides().expect("named family");
                if x > 0.0 {
                    plus.density(x)
                } else {
                    minus.density(-x)
                }
            }
        }
    }

    /// `ln(dν/dx)` at `x ≠ 0`; `-∞` where the density vanishes.
    #[inline]
    pub fn log_density_at(&self, x: f64) -> f64 {
        match self {
            LevyMeasure::Generic(g) => {
                let d = g.density(x);
                if d > 0.0 {
                    d.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            named => {
                let (plus, minus) = named.sides().expect("named family");
                if x > 0.0 {
                    plus.log_density(x)
                } else {
                    minus.log_density(-x)
                }
            }
        }
    }

    /// Lévy density `dν/dx` at `x`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::domain(
                "the Lévy density is defined on ℝ \\ {0} only (ν({0}) = 0)",
            ));
        }
        Ok(self.density_at(x))
    }

    /// Exponential tail rates of the density.
    pub fn tail_decay(&self) -> TailDecay {
        match self {
            LevyMeasure::Generic(g) => g.tails,
            named => {
                let (plus, minus) = named.sides().expect("named family");
                TailDecay::new(Some(plus.lambda), Some(minus.lambda))
            }
        }
    }

    /// Short parameter listing used for sample provenance.
    pub fn fingerprint(&self) -> String {
        match self {
            LevyMeasure::Generic(g) => alloc::format!("generic:{}", g.label),
            named => {
                let (p, m) = named.sides().expect("named family");
                alloc::format!(
                    "{}:c+={:e},a+={:e},l+={:e},c-={:e},a-={:e},l-={:e}",
                    named.family(),
                    p.c,
                    p.a,
                    p.lambda,
                    m.c,
                    m.a,
                    m.lambda
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gts_density_direct_evaluation() {
        let m = LevyMeasure::gts(
            TemperedSide::new(1.0, 0.5, 2.0),
            TemperedSide::new(0.0, 0.5, 1.0),
        )
        .unwrap();
        // e^{-2} / 1^{1.5}
        let expected = 0.135_335_283_236_612_7;
        assert!((m.density(1.0).unwrap() - expected).abs() < 1e-15);
        assert_eq!(m.density(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn vg_density_direct_evaluation() {
        let m = LevyMeasure::vg(1.0, 1.0, 1.0).unwrap();
        // e^{-2}/2
        assert!((m.density(2.0).unwrap() - 0.067_667_641_618_306_35).abs() < 1e-15);
    }

    #[test]
    fn density_rejects_origin() {
        let m = LevyMeasure::vg(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(m.density(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn symmetric_parameters_give_even_density() {
        let measures = [
            LevyMeasure::cts(0.7, 1.3, 2.0, 2.0).unwrap(),
            LevyMeasure::vg(1.5, 3.0, 3.0).unwrap(),
            LevyMeasure::gts(
                TemperedSide::new(1.0, 0.4, 1.0),
                TemperedSide::new(1.0, 0.4, 1.0),
            )
            .unwrap(),
        ];
        for m in &measures {
            for x in [1e-5, 0.3, 1.0, 7.5] {
                assert_eq!(m.density(x).unwrap(), m.density(-x).unwrap());
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(LevyMeasure::cts(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(LevyMeasure::cts(1.0, 2.0, 1.0, 1.0).is_err());
        assert!(LevyMeasure::cts(-1.0, 0.5, 1.0, 1.0).is_err());
        assert!(LevyMeasure::vg(1.0, 0.0, 1.0).is_err());
        assert!(LevyMeasure::vg_regularized(1.0, 0.2, 1.0, 1.0).is_err());
        assert!(LevyMeasure::vg_regularized(1.0, 0.05, 1.0, 1.0).is_ok());
        assert!(LevyMeasure::gts(
            TemperedSide::new(0.0, 0.5, 1.0),
            TemperedSide::new(0.0, 0.5, 1.0)
        )
        .is_err());
    }

    #[test]
    fn log_density_matches_density() {
        let m = LevyMeasure::cts(2.0, 0.3, 1.5, 0.7).unwrap();
        for x in [-3.0, -0.01, 0.02, 4.0] {
            assert!((m.log_density_at(x).exp() / m.density_at(x) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn generic_admissibility() {
        let cfg = QuadratureConfig::default();
        let ok = GenericMeasure::tempered(
            TemperedSide::new(1.0, 1.5, 2.0),
            TemperedSide::new(0.5, 0.0, 1.0),
            &cfg,
        );
        assert!(ok.is_ok());
        // |x|^{-3.5} near the origin violates ∫ x² ν < ∞
        let bad: DensityFn = Arc::new(|x: f64| x.abs().powf(-3.5) * (-x.abs()).exp());
        assert!(GenericMeasure::new("too-singular", bad, TailDecay::both(1.0), &cfg).is_err());
    }

    #[test]
    fn with_lambdas_keeps_shape() {
        let m = LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap();
        let n = m.with_lambdas(4.0, 0.5).unwrap();
        assert!(m.same_shape(&n));
        assert_eq!(n.lambdas(), Some((4.0, 0.5)));
        let g = LevyMeasure::cts(1.0, 0.6, 2.0, 3.0).unwrap();
        assert!(!m.same_shape(&g));
    }
}
