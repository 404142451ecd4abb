use levy_ig_core::divergence::MethodPreference;
use levy_ig_core::geometry::{
    alpha_connection, connection_from_divergence, fisher_metric, jeffreys_prior, laplace_beltrami,
    laplace_beltrami_rho, laplace_beltrami_rho_with, metric_from_divergence, superharmonic_scan,
    CoordinateChart, MetricMatrix, RangePolicy, RhoKind, RhoSpec,
};
use levy_ig_core::levy::{LevyMeasure, LevyModel, TemperedSide};
use levy_ig_core::models::{
    closed_form_alpha_connection, closed_form_fisher_metric, closed_form_jeffreys,
};
use levy_ig_core::quadrature::QuadratureConfig;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn chart(m: &LevyMeasure) -> CoordinateChart {
    CoordinateChart::lambda(m).unwrap()
}

const GRID: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

fn grid() -> Vec<(f64, f64)> {
    GRID.iter()
        .flat_map(|&a| GRID.iter().map(move |&b| (a, b)))
        .collect()
}

#[test]
fn cts_metric_entry() {
    let m = LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap();
    let expected = gamma(1.5) / 2f64.powf(1.5);
    assert!((expected - 0.313_329).abs() < 5e-7);
    let q = fisher_metric(&LevyModel::pure_jump(m.clone()), &chart(&m), 1.0, &cfg()).unwrap();
    assert!(rel(q.get(0, 0), expected) < 1e-8);
    assert_eq!(q.get(0, 1), 0.0);
    let fd = metric_from_divergence(
        &LevyModel::pure_jump(m.clone()),
        &chart(&m),
        0.0,
        1.0,
        Some(1e-3),
        &cfg(),
        MethodPreference::Auto,
    )
    .unwrap();
    assert!(rel(fd.get(0, 0), expected) < 1e-4);
    assert!((fd.get(0, 1) - fd.get(1, 0)).abs() <= 1e-8 * fd.max_abs());
}

#[test]
fn vg_metric_entry() {
    let m = LevyMeasure::vg(1.0, 2.0, 3.0).unwrap();
    assert!(rel(closed_form_fisher_metric(&m, 1.0).unwrap().get(0, 0), 0.25) < 1e-14);
    let q = fisher_metric(&LevyModel::pure_jump(m.clone()), &chart(&m), 1.0, &cfg()).unwrap();
    assert!(rel(q.get(0, 0), 0.25) < 1e-8);
    // a barely tempered-stable neighbour
    let near = LevyMeasure::cts(1.0, 1e-8, 2.0, 3.0).unwrap();
    let qn = fisher_metric(
        &LevyModel::pure_jump(near.clone()),
        &chart(&near),
        1.0,
        &cfg(),
    )
    .unwrap();
    assert!(rel(qn.get(0, 0), 0.25) < 1e-6);
}

#[test]
fn gts_metric_is_diagonal() {
    let m = LevyMeasure::gts(
        TemperedSide::new(0.7, 0.3, 1.5),
        TemperedSide::new(1.2, 1.4, 2.5),
    )
    .unwrap();
    let g = fisher_metric(&LevyModel::pure_jump(m.clone()), &chart(&m), 1.0, &cfg()).unwrap();
    assert_eq!(g.get(0, 1), 0.0);
    assert_eq!(g.get(1, 0), 0.0);
}

#[test]
fn cts_connection_entry() {
    let m = LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap();
    let expected = -0.5 * gamma(2.5) / 2f64.powf(2.5);
    assert!(
        rel(
            closed_form_alpha_connection(&m, 0.0, 1.0)
                .unwrap()
                .get(0, 0, 0),
            expected
        ) < 1e-12
    );
    let model = LevyModel::pure_jump(m.clone());
    let q = alpha_connection(&model, &chart(&m), 0.0, 1.0, &cfg()).unwrap();
    assert!(rel(q.get(0, 0, 0), expected) < 1e-8);
    assert_eq!(q.get(0, 1, 0), 0.0);
    assert_eq!(q.get(1, 0, 1), 0.0);
    let fd = connection_from_divergence(
        &model,
        &chart(&m),
        0.0,
        1.0,
        None,
        &cfg(),
        MethodPreference::Auto,
    )
    .unwrap();
    assert!(rel(fd.get(0, 0, 0), expected) < 1e-3);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                assert!((fd.get(i, j, k) - fd.get(j, i, k)).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn e_connection_vanishes() {
    let m = LevyMeasure::gts(
        TemperedSide::new(0.7, 0.3, 1.5),
        TemperedSide::new(1.2, 1.4, 2.5),
    )
    .unwrap();
    let model = LevyModel::pure_jump(m.clone());
    assert_eq!(
        alpha_connection(&model, &chart(&m), 1.0, 1.0, &cfg())
            .unwrap()
            .max_abs(),
        0.0
    );
    let fd = connection_from_divergence(
        &model,
        &chart(&m),
        1.0,
        1.0,
        None,
        &cfg(),
        MethodPreference::Auto,
    )
    .unwrap();
    assert!(fd.max_abs() <= 1e-6, "{fd:?}");
}

#[test]
fn jeffreys_examples() {
    let vg = LevyMeasure::vg(1.0, 2.0, 4.0).unwrap();
    let j = jeffreys_prior(&LevyModel::pure_jump(vg.clone()), &chart(&vg), 1.0, &cfg()).unwrap();
    assert!(rel(j, 0.125) < 1e-14);
    let cts = LevyMeasure::cts(1.0, 0.5, 1.0, 1.0).unwrap();
    let j = jeffreys_prior(
        &LevyModel::pure_jump(cts.clone()),
        &chart(&cts),
        1.0,
        &cfg(),
    )
    .unwrap();
    assert!(rel(j, gamma(1.5)) < 1e-12);
    assert!((j - 0.886_227).abs() < 5e-7);
}

#[test]
fn jeffreys_of_a_diffusion_free_generic_point_matches_quadrature() {
    let m = LevyMeasure::gts(
        TemperedSide::new(0.7, 0.3, 1.5),
        TemperedSide::new(1.2, 1.4, 2.5),
    )
    .unwrap();
    let g = fisher_metric(&LevyModel::pure_jump(m.clone()), &chart(&m), 2.0, &cfg()).unwrap();
    let j = jeffreys_prior(&LevyModel::pure_jump(m.clone()), &chart(&m), 2.0, &cfg()).unwrap();
    assert!(rel(j, g.det().sqrt()) < 1e-8);
}

#[test]
fn laplacian_of_constants_and_flat_quadratics() {
    let flat = |_: &[f64]| Ok(MetricMatrix::diagonal(&[1.0, 1.0], 1.0));
    let c = CoordinateChart::lambda(&LevyMeasure::vg(1.0, 1.5, 2.0).unwrap()).unwrap();
    let constant = |_: &[f64]| 3.0;
    assert!(laplace_beltrami(flat, &constant, &c).unwrap().abs() < 1e-6);
    let square = |x: &[f64]| x[0] * x[0];
    assert!((laplace_beltrami(flat, &square, &c).unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn cts_power_laplacian_sign_follows_analytic_formula() {
    // Δ(λ+^k) = k(k − a/2)·λ+^{k−a}/(TCΓ(2−a)) for the diagonal CTS metric
    let m = LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap();
    let rho = RhoSpec::new(RhoKind::PowerPlus, -0.25).unwrap();
    let v = laplace_beltrami_rho(&m, &rho, 1.0).unwrap();
    let expected = -0.25 * (-0.25 - 0.25) * 2f64.powf(-0.75) / gamma(1.5);
    assert!(rel(v, expected) < 1e-5, "{v} vs {expected}");
    assert!(v > 0.0);
    let inside = RhoSpec::new(RhoKind::PowerPlus, 0.1).unwrap();
    assert!(laplace_beltrami_rho(&m, &inside, 1.0).unwrap() < 0.0);
}

#[test]
fn scans_over_the_standard_grid() {
    let cts = LevyMeasure::cts(1.0, 0.5, 1.0, 1.0).unwrap();
    let neg = superharmonic_scan(
        &cts,
        &grid(),
        &RhoSpec::new(RhoKind::PowerPlus, -0.25).unwrap(),
        1.0,
        RangePolicy::Enforce,
    )
    .unwrap();
    assert!(neg.k_in_stated_range);
    // every value is k(k − a/2)λ^{k−a}/Γ(2−a) > 0
    assert!(!neg.all_negative);
    assert!(neg.values.iter().all(|v| v.1 > 0.0));

    let pos = superharmonic_scan(
        &cts,
        &grid(),
        &RhoSpec::new(RhoKind::PowerPlus, 0.5).unwrap(),
        1.0,
        RangePolicy::Enforce,
    );
    assert!(pos.is_err());
    let pos = superharmonic_scan(
        &cts,
        &grid(),
        &RhoSpec::new(RhoKind::PowerPlus, 0.5).unwrap(),
        1.0,
        RangePolicy::ReportOnly,
    )
    .unwrap();
    assert!(!pos.all_negative);
    assert!(!pos.k_in_stated_range);

    let vg = LevyMeasure::vg(1.0, 1.0, 1.0).unwrap();
    let prod = superharmonic_scan(
        &vg,
        &grid(),
        &RhoSpec::new(RhoKind::Product, 0.5).unwrap(),
        1.0,
        RangePolicy::Enforce,
    )
    .unwrap();
    // Δ(λ+^k λ-^k) = 2k²λ+^kλ-^k/(TC) on the flat-in-log VG metric
    for ((lp, lm), v) in &prod.values {
        assert!(rel(*v, 2.0 * 0.25 * (lp * lm).sqrt()) < 1e-5);
    }
    assert!(!prod.all_negative);
    assert_eq!(prod.worst_point, (4.0, 4.0));
}

#[test]
fn zero_exponent_is_rejected() {
    let vg = LevyMeasure::vg(1.0, 1.0, 1.0).unwrap();
    let rho = RhoSpec::new(RhoKind::PowerPlus, 0.0);
    match rho {
        Err(_) => {}
        Ok(r) => assert!(superharmonic_scan(&vg, &grid(), &r, 1.0, RangePolicy::Enforce).is_err()),
    }
}

fn named_model() -> impl Strategy<Value = LevyMeasure> {
    prop_oneof![
        (
            0.5..2.0f64,
            prop_oneof![0.2..0.8f64, 1.2..1.8f64],
            0.8..3.0f64,
            0.8..3.0f64
        )
            .prop_map(|(c, a, lp, lm)| LevyMeasure::cts(c, a, lp, lm).unwrap()),
        (0.5..2.0f64, 0.8..3.0f64, 0.8..3.0f64)
            .prop_map(|(c, lp, lm)| LevyMeasure::vg(c, lp, lm).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn three_metric_routes_agree(m in named_model(), t in 0.5..2.0f64) {
        let model = LevyModel::pure_jump(m.clone());
        let closed = closed_form_fisher_metric(&m, t).unwrap();
        let quad = fisher_metric(&model, &chart(&m), t, &cfg()).unwrap();
        prop_assert!(quad.max_relative_deviation(&closed) <= 1e-4);
        for alpha in [-0.5, 0.0, 0.5] {
            let fd = metric_from_divergence(&model, &chart(&m), alpha, t, None, &cfg(), MethodPreference::Auto).unwrap();
            prop_assert!(fd.max_relative_deviation(&closed) <= 1e-4, "α={alpha}: {fd:?} vs {closed:?}");
            prop_assert!(fd.max_relative_deviation(&quad) <= 1e-4);
        }
    }

    #[test]
    fn connection_routes_agree(m in named_model(), alpha in -0.9..0.9f64) {
        let model = LevyModel::pure_jump(m.clone());
        let closed = closed_form_alpha_connection(&m, alpha, 1.0).unwrap();
        let quad = alpha_connection(&model, &chart(&m), alpha, 1.0, &cfg()).unwrap();
        prop_assert!(quad.max_relative_deviation(&closed) <= 1e-6);
        let fd = connection_from_divergence(&model, &chart(&m), alpha, 1.0, None, &cfg(), MethodPreference::Auto).unwrap();
        prop_assert!(fd.max_relative_deviation(&closed) <= 1e-3, "{fd:?} vs {closed:?}");
    }

    #[test]
    fn connection_duality(m in named_model(), alpha in 0.0..1.0f64, sigma in prop_oneof![Just(0.0), 0.2..0.8f64]) {
        let model = LevyModel::new(sigma, 0.1, m.clone()).unwrap();
        let c = chart(&m);
        let plus = alpha_connection(&model, &c, alpha, 1.0, &cfg()).unwrap();
        let minus = alpha_connection(&model, &c, -alpha, 1.0, &cfg()).unwrap();
        let zero = alpha_connection(&model, &c, 0.0, 1.0, &cfg()).unwrap();
        for ((p, q), z) in plus.entries().iter().zip(minus.entries()).zip(zero.entries()) {
            prop_assert!((p + q - 2.0 * z).abs() <= 1e-8);
        }
    }

    #[test]
    fn jeffreys_scales_with_horizon_and_relabels(m in named_model(), t in 0.2..3.0f64) {
        let one = closed_form_jeffreys(&m, t).unwrap();
        let two = closed_form_jeffreys(&m, 2.0 * t).unwrap();
        prop_assert!(rel(two, 2.0 * one) <= 1e-12);
        let (lp, lm) = m.lambdas().unwrap();
        let swapped = m.with_lambdas(lm, lp).unwrap();
        prop_assert!(rel(closed_form_jeffreys(&swapped, t).unwrap(), one) <= 1e-12);
        let model = LevyModel::pure_jump(m.clone());
        prop_assert!(rel(jeffreys_prior(&model, &chart(&m), t, &cfg()).unwrap(), one) <= 1e-10);
    }

    #[test]
    fn laplacian_routes_agree(m in named_model(), k in -0.9..0.9f64, kind in 0usize..4) {
        prop_assume!(k.abs() > 0.05);
        let kind = [RhoKind::PowerPlus, RhoKind::PowerMinus, RhoKind::LinearCombo { c1: 1.0, c2: 2.0 }, RhoKind::Product][kind];
        let rho = RhoSpec::new(kind, k).unwrap();
        let analytic = laplace_beltrami_rho(&m, &rho, 1.0).unwrap();
        let c = chart(&m);
        let fd = laplace_beltrami_rho_with(&m, &rho, &c, |p| {
            let at = LevyModel::pure_jump(c.apply(&m, p)?);
            metric_from_divergence(&at, &c.with_point(p.to_vec())?, 0.0, 1.0, None, &cfg(), MethodPreference::Auto)
        }).unwrap();
        prop_assert!((fd - analytic).abs() <= 1e-4 * analytic.abs().max(1e-3), "{fd} vs {analytic}");
    }
}
