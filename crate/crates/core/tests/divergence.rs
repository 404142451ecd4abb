use levy_ig_core::divergence::{
    alpha_divergence, delta_alpha, linear_alpha_divergence, DivergenceRequest, Method,
    MethodPreference,
};
use levy_ig_core::levy::{martingale_drift, LevyMeasure, LevyModel, TemperedSide};
use levy_ig_core::quadrature::QuadratureConfig;
use proptest::prelude::*;
use std::f64::consts::PI;

fn one_sided(lp: f64) -> LevyModel {
    LevyModel::pure_jump(
        LevyMeasure::gts(
            TemperedSide::new(1.0, 0.5, lp),
            TemperedSide::new(0.0, 0.5, 1.0),
        )
        .unwrap(),
    )
}

fn cts(a: f64, lp: f64, lm: f64) -> LevyModel {
    LevyModel::pure_jump(LevyMeasure::cts(1.0, a, lp, lm).unwrap())
}

fn quadrature(alpha: f64, t: f64) -> DivergenceRequest {
    DivergenceRequest::new(alpha, t).with_method(MethodPreference::Quadrature)
}

#[test]
fn one_sided_gts_examples_by_quadrature() {
    let (p, q) = (one_sided(1.0), one_sided(2.0));
    // −Γ(−½) = 2√π
    let g = 2.0 * PI.sqrt();
    let delta = delta_alpha(&p, &q, &quadrature(0.0, 1.0)).unwrap();
    assert_eq!(delta.method, Method::Quadrature);
    assert!((delta.delta - g * (1.5f64.sqrt() - 0.5 - 0.5 * 2f64.sqrt())).abs() < 1e-9);
    assert!((delta.delta - 0.062_527).abs() < 5e-6);
    assert_eq!(delta.drift_term, 0.0);

    let kl = alpha_divergence(&p, &q, &quadrature(-1.0, 1.0)).unwrap();
    assert!((kl.value - g * (1.5 - 2f64.sqrt())).abs() < 1e-9);
    assert!((kl.value - 0.304_107).abs() < 5e-6);

    let linear = linear_alpha_divergence(&p, &q, &quadrature(0.0, 1.0)).unwrap();
    assert!((linear - 0.250_107).abs() < 2e-5);
}

#[test]
fn closed_form_is_auto_selected_for_tempering_pairs() {
    let r = alpha_divergence(
        &one_sided(1.0),
        &one_sided(2.0),
        &DivergenceRequest::new(0.3, 1.0),
    )
    .unwrap();
    assert_eq!(r.method, Method::ClosedForm);
}

#[test]
fn gaussian_kl_is_drift_only() {
    let p = LevyModel::diffusion(1.0, 1.0).unwrap();
    let q = LevyModel::diffusion(1.0, 0.0).unwrap();
    let kl = alpha_divergence(&p, &q, &DivergenceRequest::new(-1.0, 1.0)).unwrap();
    assert!((kl.value - 0.5).abs() <= 1e-12);
    assert_eq!(kl.jump_term, 0.0);
}

#[test]
fn delta_vanishes_at_the_boundary_and_for_identical_laws() {
    let (p, q) = (cts(0.5, 1.0, 2.0), cts(0.5, 2.0, 2.0));
    for a in [-1.0, 1.0] {
        assert_eq!(
            delta_alpha(&p, &q, &DivergenceRequest::new(a, 1.0))
                .unwrap()
                .delta,
            0.0
        );
    }
    for a in [-1.0, -0.3, 0.0, 0.7, 1.0] {
        assert_eq!(
            alpha_divergence(&p, &p, &quadrature(a, 2.0)).unwrap().value,
            0.0
        );
    }
}

#[test]
fn tiny_delta_makes_linear_form_agree() {
    let (p, q) = (cts(0.5, 1.0, 2.0), cts(0.5, 1.001, 2.0));
    let req = DivergenceRequest::new(0.2, 1.0);
    let d = alpha_divergence(&p, &q, &req).unwrap();
    assert!(d.delta <= 1e-6);
    let lin = linear_alpha_divergence(&p, &q, &req).unwrap();
    assert!((lin / d.value - 1.0).abs() <= 1e-5);
}

#[test]
fn martingale_and_general_forms_agree() {
    let cfg = QuadratureConfig::default();
    let mp = LevyMeasure::cts(1.0, 0.5, 3.0, 2.0).unwrap();
    let mq = LevyMeasure::cts(1.0, 0.5, 4.0, 2.5).unwrap();
    let p = LevyModel::new(0.4, martingale_drift(0.4, &mp, &cfg).unwrap(), mp).unwrap();
    let q = LevyModel::new(0.4, martingale_drift(0.4, &mq, &cfg).unwrap(), mq).unwrap();
    for alpha in [-0.5, 0.0, 0.5] {
        let general = delta_alpha(&p, &q, &DivergenceRequest::new(alpha, 1.0)).unwrap();
        let mart = delta_alpha(
            &p,
            &q,
            &DivergenceRequest::new(alpha, 1.0).with_martingale_form(true),
        )
        .unwrap();
        assert!((general.delta / mart.delta - 1.0).abs() <= 1e-8);
        assert!(general.drift_term > 0.0);
    }
    // the martingale form is refused for models without martingale drift
    let off = LevyModel::new(0.4, 0.0, p.measure().clone()).unwrap();
    assert!(delta_alpha(
        &off,
        &q,
        &DivergenceRequest::new(0.0, 1.0).with_martingale_form(true)
    )
    .is_err());
}

#[test]
fn kl_is_linear_in_horizon() {
    let (p, q) = (cts(1.5, 1.0, 2.0), cts(1.5, 2.0, 0.5));
    let one = alpha_divergence(&p, &q, &DivergenceRequest::new(-1.0, 1.0))
        .unwrap()
        .value;
    let three = alpha_divergence(&p, &q, &DivergenceRequest::new(-1.0, 3.0))
        .unwrap()
        .value;
    assert!((three - 3.0 * one).abs() <= 1e-12 * three);
}

#[test]
fn sigma_mismatch_is_rejected() {
    let p = LevyModel::new(0.3, 0.0, LevyMeasure::vg(1.0, 1.0, 1.0).unwrap()).unwrap();
    let q = LevyModel::new(0.4, 0.0, LevyMeasure::vg(1.0, 1.0, 1.0).unwrap()).unwrap();
    assert!(alpha_divergence(&p, &q, &DivergenceRequest::new(0.0, 1.0)).is_err());
}

fn lambda() -> impl Strategy<Value = f64> {
    0.5..4.0f64
}

fn tail_index() -> impl Strategy<Value = f64> {
    prop_oneof![0.1..0.9f64, 1.1..1.9f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn divergence_is_nonnegative_and_vanishes_only_on_the_diagonal(
        a in tail_index(), lp in lambda(), lm in lambda(), lq in lambda(), alpha in -1.0..1.0f64,
    ) {
        let p = cts(a, lp, lm);
        let q = cts(a, lq, lm);
        let d = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, 1.0)).unwrap().value;
        prop_assert!(d >= 0.0);
        if (lp - lq).abs() > 1e-3 {
            prop_assert!(d > 0.0);
        }
        prop_assert_eq!(alpha_divergence(&p, &p, &DivergenceRequest::new(alpha, 1.0)).unwrap().value, 0.0);
    }

    #[test]
    fn alpha_duality(a in tail_index(), lp in lambda(), lm in lambda(), lq in lambda(), alpha in -0.9..0.9f64, t in 0.2..2.0f64) {
        let p = cts(a, lp, lm);
        let q = cts(a, lq, lm * 1.3);
        let fwd = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, t)).unwrap().value;
        let back = alpha_divergence(&q, &p, &DivergenceRequest::new(-alpha, t)).unwrap().value;
        prop_assert!((fwd - back).abs() <= 1e-10);
    }

    #[test]
    fn quadrature_duality_for_generic_shapes(lp in lambda(), lq in lambda(), alpha in -0.9..0.9f64) {
        // GTS sides with different tail indices per side: no closed form is involved
        let p = LevyModel::pure_jump(LevyMeasure::gts(TemperedSide::new(1.0, 0.4, lp), TemperedSide::new(0.7, 1.3, 2.0)).unwrap());
        let q = LevyModel::pure_jump(LevyMeasure::gts(TemperedSide::new(1.0, 0.4, lq), TemperedSide::new(0.7, 1.3, 1.5)).unwrap());
        let fwd = alpha_divergence(&p, &q, &quadrature(alpha, 1.0)).unwrap().value;
        let back = alpha_divergence(&q, &p, &quadrature(-alpha, 1.0)).unwrap().value;
        prop_assert!((fwd - back).abs() <= 1e-8 * fwd.max(1e-3), "{fwd} vs {back}");
    }

    #[test]
    fn continuous_at_the_boundary(a in tail_index(), lp in lambda(), lq in lambda()) {
        prop_assume!((lp - lq).abs() > 0.1);
        let p = cts(a, lp, 2.0);
        let q = cts(a, lq, 2.0);
        for (edge, inside) in [(-1.0, -1.0 + 1e-4), (1.0, 1.0 - 1e-4)] {
            let at = alpha_divergence(&p, &q, &DivergenceRequest::new(edge, 1.0)).unwrap().value;
            let near = alpha_divergence(&p, &q, &DivergenceRequest::new(inside, 1.0)).unwrap().value;
            prop_assert!((near - at).abs() <= 1e-3 * at);
        }
    }

    #[test]
    fn linear_form_dominates(a in tail_index(), lp in lambda(), lq in lambda(), alpha in -0.99..0.99f64) {
        let p = cts(a, lp, 1.0);
        let q = cts(a, lq, 1.0);
        let req = DivergenceRequest::new(alpha, 1.0);
        prop_assert!(linear_alpha_divergence(&p, &q, &req).unwrap() >= alpha_divergence(&p, &q, &req).unwrap().value);
    }

    #[test]
    fn value_is_increasing_in_horizon(a in tail_index(), lp in lambda(), lq in lambda(), alpha in -0.9..0.9f64) {
        prop_assume!((lp - lq).abs() > 0.05);
        let p = cts(a, lp, 1.0);
        let q = cts(a, lq, 1.0);
        let d1 = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, 1.0)).unwrap();
        let d2 = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, 2.0)).unwrap();
        prop_assert!(d2.value > d1.value);
        // concave in Δ: doubling Δ less than doubles the value
        prop_assert!(d2.value <= 2.0 * d1.value);
    }

    #[test]
    fn value_matches_delta(a in tail_index(), lp in lambda(), lq in lambda(), alpha in -0.95..0.95f64) {
        let p = cts(a, lp, 1.0);
        let q = cts(a, lq, 1.0);
        let d = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, 1.0)).unwrap();
        let expected = 4.0 / (1.0 - alpha * alpha) * -(-d.delta).exp_m1();
        prop_assert!((d.value - expected).abs() <= 1e-14 * expected.max(1e-300));
    }
}
