//! Adaptive Gauss–Kronrod quadrature tuned for Lévy-measure integrals.
//!
//! Lévy densities have a power singularity `|x|^{-1-a}` at the origin and
//! (for the families handled here) exponential tails. Integrals over the
//! real line are therefore split at `±inner_cut`, `±1` and `±outer_cut`:
//!
//! * `(0, inner_cut]` is mapped to `s ∈ [0, S)` through `x = inner_cut·e^{-s}`,
//!   which turns the power singularity into an exponentially decaying
//!   integrand;
//! * `[inner_cut, 1]` and `[1, outer_cut]` are integrated directly (the split
//!   at 1 absorbs the jump of the compensator `𝟙_{|x|≤1}`);
//! * `(outer_cut, ∞)` is mapped to `u ∈ (0, 1]` through `u = e^{-κ(x-outer_cut)}`
//!   where `κ` is the tail decay rate of the integrand. Without a rate the
//!   tail is truncated and a bound on the neglected mass is recorded.

use alloc::collections::BinaryHeap;
use alloc::format;
use core::cmp::Ordering;
use core::ops::Add;

#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Smallest `x = inner_cut·e^{-s}` visited by the origin substitution is
/// `inner_cut·e^{-MAX_LOG_DEPTH}` (about `3e-76` for the default cut), where
/// `|x|^{-3}` still fits in an f64.
const MAX_LOG_DEPTH: f64 = 160.0;

/// Outer cut used when neither the config nor the integrand supplies a scale.
const FALLBACK_OUTER_CUT: f64 = 50.0;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes (the 10-point Gauss rule).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and split points for Lévy-measure integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Split radius around the origin.
    pub inner_cut: f64,
    /// Tail split. `None` derives it from the integrand's slowest decay rate
    /// as `30 / rate`.
    pub outer_cut: Option<f64>,
    /// Subdivision budget for each piece of the split.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            inner_cut: 1e-6,
            outer_cut: None,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        crate::error::check_positive("rel_tol", self.rel_tol)?;
        crate::error::check_positive("abs_tol", self.abs_tol)?;
        crate::error::check_positive("inner_cut", self.inner_cut)?;
        if self.inner_cut >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "inner_cut",
                value: self.inner_cut,
                reason: "must be below 1",
            });
        }
        if let Some(outer) = self.outer_cut {
            if !(outer.is_finite() && outer > 1.0) {
                return Err(Error::InvalidParameter {
                    name: "outer_cut",
                    value: outer,
                    reason: "must exceed 1 (and therefore inner_cut)",
                });
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }

    /// Tail split for an integrand whose slowest exponential decay is `rate`.
    pub fn outer_cut_for(&self, rate: Option<f64>) -> f64 {
        match (self.outer_cut, rate) {
            (Some(outer), _) => outer,
            (None, Some(rate)) if rate > 0.0 => (30.0 / rate).max(2.0),
            _ => FALLBACK_OUTER_CUT,
        }
    }

    fn tolerance(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

/// Exponential decay rates of an integrand on each half-line,
/// `|f(x)| ≲ e^{-rate·|x|}` as `|x| → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TailDecay {
    pub plus: Option<f64>,
    pub minus: Option<f64>,
}

impl TailDecay {
    pub fn new(plus: Option<f64>, minus: Option<f64>) -> Self {
        Self { plus, minus }
    }

    pub fn both(rate: f64) -> Self {
        Self::new(Some(rate), Some(rate))
    }

    pub fn mirrored(self) -> Self {
        Self::new(self.minus, self.plus)
    }

    /// Slowest of the two rates, or `None` if either side is unknown.
    pub fn min_rate(&self) -> Option<f64> {
        Some(self.plus?.min(self.minus?))
    }

    /// Side-wise minimum of two decay profiles.
    pub fn slowest(self, other: TailDecay) -> TailDecay {
        let pick = |a: Option<f64>, b: Option<f64>| Some(a?.min(b?));
        TailDecay::new(pick(self.plus, other.plus), pick(self.minus, other.minus))
    }
}

/// Value of a definite integral with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Integral {
    pub value: f64,
    /// Estimated quadrature error (sum over pieces).
    pub abs_error: f64,
    /// Bound on mass dropped by truncating the domain, when no tail rate was
    /// available or the origin substitution was cut off.
    pub truncation_bound: f64,
}

impl Add for Integral {
    type Output = Integral;

    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            abs_error: self.abs_error + rhs.abs_error,
            truncation_bound: self.truncation_bound + rhs.truncation_bound,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut values = [0.0f64; 21];
    values[10] = f_center;
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        values[j] = lo;
        values[20 - j] = hi;
        kronrod += WGK[j] * (lo + hi);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut abs_sum = WGK[10] * f_center.abs();
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        abs_sum += WGK[j] * (values[j].abs() + values[20 - j].abs());
        asc += WGK[j] * ((values[j] - mean).abs() + (values[20 - j] - mean).abs());
    }
    let result = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

/// Adaptive Gauss–Kronrod (21-point) integration of a smooth integrand over `[a, b]`.
///
/// Errors with [`Error::Divergent`] as soon as the integrand produces a
/// non-finite value, and with [`Error::QuadratureNonConvergence`] (carrying
/// the partial estimate) when the subdivision budget runs out.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral::default());
    }
    let (value, error) = gauss_kronrod_21(&mut f, a, b);
    check_finite(value, error, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_error = error;

    for _ in 0..cfg.max_subdivisions {
        if total_error <= cfg.tolerance(total) {
            break;
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval exhausted at machine resolution; keep its contribution
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_error = heap.iter().map(|s| s.error).sum();
            continue;
        }
        let (v1, e1) = gauss_kronrod_21(&mut f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_21(&mut f, mid, worst.b);
        check_finite(v1, e1, worst.a, mid)?;
        check_finite(v2, e2, mid, worst.b)?;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        total = heap.iter().map(|s| s.value).sum();
        total_error = heap.iter().map(|s| s.error).sum();
    }

    if total_error > cfg.tolerance(total) {
        return Err(Error::QuadratureNonConvergence {
            estimate: total,
            error: total_error,
            subdivisions: cfg.max_subdivisions,
        });
    }
    Ok(Integral {
        value: total,
        abs_error: total_error,
        truncation_bound: 0.0,
    })
}

fn check_finite(value: f64, error: f64, a: f64, b: f64) -> Result<()> {
    if value.is_finite() && error.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergent(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )))
    }
}

/// `∫_0^{cut} f(x) dx` for integrands with an integrable power singularity at 0.
fn integrate_origin<F: FnMut(f64) -> f64>(
    f: &mut F,
    cut: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let mut g = |s: f64| {
        let x = cut * (-s).exp();
        f(x) * x
    };
    let mut part = integrate(&mut g, 0.0, MAX_LOG_DEPTH, cfg)?;
    // Past the depth the integrand is a power of x, i.e. g(s) ≈ g(S)e^{-κ(s-S)}
    // in the substituted variable; for a → 2 that decay is slow enough that
    // dropping the remainder would cost visible accuracy.
    let s = MAX_LOG_DEPTH;
    let (g0, g1, g2) = (g(s - 2.0), g(s - 1.0), g(s));
    if g2 != 0.0 {
        let (r1, r2) = (g0 / g1, g1 / g2);
        // ratios within rounding of 1 mean g is flat: a log divergence
        let decaying = |r: f64| r > 1.0 + 1e-12 && r.is_finite();
        if decaying(r1) && decaying(r2) {
            let rest = g2 / r2.ln();
            part.value += rest;
            part.truncation_bound += (rest - g2 / r1.ln()).abs();
        } else if r1 > 0.0 && r2 > 0.0 && g2.abs() > cfg.abs_tol {
            // no decay towards the origin: |f(x)| ≳ 1/x
            return Err(Error::Divergent(format!(
                "integrand does not decay towards the origin (x·f(x) = {g2:e} at x = {:e})",
                cut * (-s).exp()
            )));
        } else {
            part.truncation_bound += g2.abs();
        }
    }
    Ok(part)
}

/// `∫_{cut}^∞ f(x) dx` for an integrand decaying like `e^{-rate·x}`; truncated
/// at `cut` when the rate is unknown.
fn integrate_tail<F: FnMut(f64) -> f64>(
    f: &mut F,
    cut: f64,
    rate: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    match rate {
        Some(rate) if rate > 0.0 => integrate(
            |u: f64| {
                let x = cut - u.ln() / rate;
                f(x) / (rate * u)
            },
            0.0,
            1.0,
            cfg,
        ),
        _ => Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            truncation_bound: (f(cut) * cut).abs(),
        }),
    }
}

/// `∫_0^∞ f(x) dx` using the origin substitution, the split at 1, and the
/// tail substitution with the given decay rate.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    rate: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let outer = cfg.outer_cut_for(rate);
    let inner = cfg.inner_cut;
    Ok(integrate_origin(&mut f, inner, cfg)?
        + integrate(&mut f, inner, 1.0, cfg)?
        + integrate(&mut f, 1.0, outer, cfg)?
        + integrate_tail(&mut f, outer, rate, cfg)?)
}

/// `∫_ℝ f(x) dx` over the punctured real line.
///
/// When `cfg.outer_cut` is unset, the split is placed at `30 / rate` using
/// the slower of the two tail rates so both half-lines share one layout.
pub fn integrate_line<F: FnMut(f64) -> f64>(
    mut f: F,
    tails: TailDecay,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let shared = QuadratureConfig {
        outer_cut: Some(cfg.outer_cut_for(tails.min_rate().or(tails.plus).or(tails.minus))),
        ..*cfg
    };
    let plus = integrate_half_line(&mut f, tails.plus, &shared)?;
    let minus = integrate_half_line(|x| f(-x), tails.minus, &shared)?;
    Ok(plus + minus)
}

/// `∫_{-1}^{1} f(x) dx` over the punctured unit window.
pub fn integrate_unit_window<F: FnMut(f64) -> f64>(
    mut f: F,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let inner = cfg.inner_cut;
    let plus = integrate_origin(&mut f, inner, cfg)? + integrate(&mut f, inner, 1.0, cfg)?;
    let mut g = |x: f64| f(-x);
    let minus = integrate_origin(&mut g, inner, cfg)? + integrate(&mut g, inner, 1.0, cfg)?;
    Ok(plus + minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn power_singularity_at_origin() {
        // ∫_0^∞ x^{-1/2} e^{-x} dx = Γ(1/2) = √π
        let r = integrate_half_line(|x| x.powf(-0.5) * (-x).exp(), Some(1.0), &cfg()).unwrap();
        assert!(
            (r.value - core::f64::consts::PI.sqrt()).abs() < 1e-10,
            "{}",
            r.value
        );
        assert!(r.truncation_bound < 1e-40);
    }

    #[test]
    fn strong_singularity_of_levy_type() {
        // ∫_0^∞ x^2 · x^{-2.5} e^{-2x} dx = Γ(0.5) 2^{-0.5}
        let exact = core::f64::consts::PI.sqrt() / 2f64.sqrt();
        let r =
            integrate_half_line(|x| x.powf(-0.5) * (-2.0 * x).exp(), Some(2.0), &cfg()).unwrap();
        assert!((r.value / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_sided_line_with_asymmetric_tails() {
        // ∫ e^{-3|x|} for x>0 and e^{-|x|} for x<0 = 1/3 + 1
        let f = |x: f64| if x > 0.0 { (-3.0 * x).exp() } else { x.exp() };
        let r = integrate_line(f, TailDecay::new(Some(3.0), Some(1.0)), &cfg()).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn missing_rate_truncates_and_reports_bound() {
        let cfg = QuadratureConfig {
            outer_cut: Some(5.0),
            ..cfg()
        };
        let r = integrate_half_line(|x: f64| (-x).exp(), None, &cfg).unwrap();
        assert!((r.value - (1.0 - (-5.0f64).exp())).abs() < 1e-10);
        assert!(r.truncation_bound > 0.0);
    }

    #[test]
    fn nonintegrable_singularity_is_divergent() {
        let err = integrate_half_line(|x| x.powf(-2.5), Some(1.0), &cfg()).unwrap_err();
        assert!(matches!(err, Error::Divergent(_)), "{err:?}");
    }

    #[test]
    fn budget_exhaustion_reports_partial_estimate() {
        let tight = QuadratureConfig {
            max_subdivisions: 2,
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            ..cfg()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tight).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { estimate, .. } => assert!(estimate > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_window_handles_compensator() {
        // ∫_{-1}^{1} x·x^{-1.5}... odd integrand with asymmetric weights
        let f = |x: f64| x * x.abs().powf(-1.5) * if x > 0.0 { 2.0 } else { 1.0 };
        // = 2∫_0^1 x^{-1/2} - ∫_0^1 x^{-1/2} = 2
        let r = integrate_unit_window(f, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let bad = QuadratureConfig {
            inner_cut: 2.0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            outer_cut: Some(0.5),
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }
}
