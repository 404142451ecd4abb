//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::time::{Duration, Instant};

use levy_ig::bench::{parallel_bias_benchmark, report_json, threads_from_env};
use levy_ig::json;
use levy_ig_core::divergence::{alpha_divergence, DivergenceRequest, Method, MethodPreference};
use levy_ig_core::geometry::{
    alpha_connection, connection_from_divergence, fisher_metric, metric_from_divergence,
    superharmonic_scan, CoordinateChart, RangePolicy, RhoKind, RhoSpec,
};
use levy_ig_core::inference::{
    density_grid, log_jeffreys, log_likelihood, penalized_log_likelihood, simulate,
    BenchmarkConfig, FitOptions, Halfwidth, LikelihoodOptions, DEFAULT_GRID_POINTS,
};
use levy_ig_core::levy::{characteristic_exponent, LevyMeasure, LevyModel, TemperedSide};
use levy_ig_core::models::{
    closed_form_alpha_connection, closed_form_alpha_divergence, closed_form_fisher_metric,
    closed_form_jeffreys, FamilyPair,
};
use levy_ig_core::QuadratureConfig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, Normal};

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const TAIL_INDICES: [f64; 3] = [0.3, 0.5, 1.5];
const ALPHAS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
const HORIZONS: [f64; 2] = [0.5, 1.0];

type Criterion = (u32, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn pure(m: LevyMeasure) -> LevyModel {
    LevyModel::pure_jump(m)
}

/// `(P, Q)` measure pairs over the λ grid: CTS with swapped tempering and a
/// GTS with different scales per side.
fn grid_pairs() -> Vec<(LevyMeasure, LevyMeasure)> {
    let mut pairs = Vec::new();
    for a in TAIL_INDICES {
        for l in LAMBDAS {
            for lt in LAMBDAS {
                pairs.push((
                    LevyMeasure::cts(1.0, a, l, lt).unwrap(),
                    LevyMeasure::cts(1.0, a, lt, l).unwrap(),
                ));
                let gts = |lp, lm| {
                    LevyMeasure::gts(TemperedSide::new(1.0, a, lp), TemperedSide::new(0.6, a, lm))
                        .unwrap()
                };
                pairs.push((gts(l, lt), gts(lt, l)));
            }
        }
    }
    pairs
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (mp, mq) in grid_pairs() {
        let pair = FamilyPair::new(&mp, &mq).unwrap();
        let (p, q) = (pure(mp), pure(mq));
        for alpha in ALPHAS {
            for t in HORIZONS {
                let closed = closed_form_alpha_divergence(&pair, alpha, t).unwrap();
                let req =
                    DivergenceRequest::new(alpha, t).with_method(MethodPreference::Quadrature);
                let quad = alpha_divergence(&p, &q, &req).unwrap();
                assert_eq!(quad.method, Method::Quadrature);
                let quad = quad.value;
                if closed == 0.0 {
                    worst = worst.max(quad.abs());
                } else {
                    worst = worst.max(rel(quad, closed));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed <= Duration::from_secs(60),
        format!(
            "max rel deviation {worst:.3e} (≤ 1e-6), {:.1} s (≤ 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for (mp, mq) in grid_pairs() {
        let (p, q) = (pure(mp), pure(mq));
        for alpha in ALPHAS {
            for t in HORIZONS {
                let fwd = alpha_divergence(&p, &q, &DivergenceRequest::new(alpha, t)).unwrap();
                let back = alpha_divergence(&q, &p, &DivergenceRequest::new(-alpha, t)).unwrap();
                worst = worst.max((fwd.value - back.value).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |D(α)(P‖Q) − D(−α)(Q‖P)| = {worst:.3e} (≤ 1e-10)"),
    )
}

fn criterion_3() -> Outcome {
    let points = [
        (0.3, 0.5, 1.0),
        (0.3, 2.0, 4.0),
        (0.5, 1.0, 2.0),
        (0.5, 4.0, 0.5),
        (0.5, 0.5, 2.0),
        (1.5, 1.0, 4.0),
        (1.5, 2.0, 0.5),
        (1.5, 4.0, 1.0),
        (0.3, 1.0, 0.5),
        (1.5, 0.5, 2.0),
    ];
    let mut worst = 0.0f64;
    for (a, l, lt) in points {
        let p = pure(LevyMeasure::cts(1.0, a, l, 1.0).unwrap());
        let q = pure(LevyMeasure::cts(1.0, a, lt, 1.0).unwrap());
        for (edge, inside) in [(-1.0, -1.0 + 1e-4), (1.0, 1.0 - 1e-4)] {
            let at = alpha_divergence(&p, &q, &DivergenceRequest::new(edge, 1.0))
                .unwrap()
                .value;
            let near = alpha_divergence(&p, &q, &DivergenceRequest::new(inside, 1.0))
                .unwrap()
                .value;
            worst = worst.max(rel(near, at));
        }
    }
    outcome(
        worst <= 1e-3,
        format!("max rel jump at α = ±1 over 10 points: {worst:.3e} (≤ 1e-3)"),
    )
}

fn criterion_4() -> Outcome {
    let p = LevyModel::diffusion(1.0, 1.0).unwrap();
    let q = LevyModel::diffusion(1.0, 0.0).unwrap();
    let kl = alpha_divergence(&p, &q, &DivergenceRequest::new(-1.0, 1.0))
        .unwrap()
        .value;
    let err = (kl - 0.5).abs();
    outcome(
        err <= 1e-12,
        format!("KL = {kl:.17} (|KL − 0.5| = {err:.1e} ≤ 1e-12)"),
    )
}

fn criterion_5() -> Outcome {
    const A: f64 = 1e-6;
    let mut worst = 0.0f64;
    for (lp, lm, lq) in [(1.0, 1.0, 2.0), (2.0, 3.0, 0.5), (0.5, 4.0, 4.0)] {
        let vg = |l| LevyMeasure::vg(1.0, l, lm).unwrap();
        let reg = |l| LevyMeasure::vg_regularized(1.0, A, l, lm).unwrap();
        let exact = FamilyPair::new(&vg(lp), &vg(lq)).unwrap();
        let limit = FamilyPair::new(&reg(lp), &reg(lq)).unwrap();
        for alpha in [-1.0, 0.0, 1.0] {
            let e = closed_form_alpha_divergence(&exact, alpha, 1.0).unwrap();
            let l = closed_form_alpha_divergence(&limit, alpha, 1.0).unwrap();
            worst = worst.max(rel(l, e));
        }
        let g = closed_form_fisher_metric(&vg(lp), 1.0).unwrap();
        worst = worst.max(
            closed_form_fisher_metric(&reg(lp), 1.0)
                .unwrap()
                .max_relative_deviation(&g),
        );
        for alpha in [-0.5, 0.0, 0.5] {
            let c = closed_form_alpha_connection(&vg(lp), alpha, 1.0).unwrap();
            let r = closed_form_alpha_connection(&reg(lp), alpha, 1.0).unwrap();
            worst = worst.max(r.max_relative_deviation(&c));
        }
        let j = closed_form_jeffreys(&vg(lp), 1.0).unwrap();
        worst = worst.max(rel(closed_form_jeffreys(&reg(lp), 1.0).unwrap(), j));
    }
    outcome(
        worst <= 1e-4,
        format!("max rel deviation at a = 1e-6: {worst:.3e} (≤ 1e-4)"),
    )
}

fn criterion_6() -> Outcome {
    let models = [
        LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap(),
        LevyMeasure::cts(0.8, 1.5, 1.0, 4.0).unwrap(),
        LevyMeasure::vg(1.0, 2.0, 3.0).unwrap(),
        LevyMeasure::gts(
            TemperedSide::new(0.7, 0.4, 2.0),
            TemperedSide::new(1.2, 1.3, 3.0),
        )
        .unwrap(),
    ];
    let (mut metric, mut conn, mut alpha_dep) = (0.0f64, 0.0f64, 0.0f64);
    for m in &models {
        let model = pure(m.clone());
        let chart = CoordinateChart::lambda(m).unwrap();
        let closed = closed_form_fisher_metric(m, 1.0).unwrap();
        let quad = fisher_metric(&model, &chart, 1.0, &cfg()).unwrap();
        let fd: Vec<_> = [-0.5, 0.0, 0.5]
            .iter()
            .map(|&a| {
                metric_from_divergence(&model, &chart, a, 1.0, None, &cfg(), MethodPreference::Auto)
                    .unwrap()
            })
            .collect();
        metric = metric.max(closed.max_relative_deviation(&quad));
        for g in &fd {
            metric = metric
                .max(closed.max_relative_deviation(g))
                .max(quad.max_relative_deviation(g));
            alpha_dep = alpha_dep.max(fd[1].max_relative_deviation(g));
        }
        for alpha in [-0.5, 0.0, 0.5] {
            let c = closed_form_alpha_connection(m, alpha, 1.0).unwrap();
            let q = alpha_connection(&model, &chart, alpha, 1.0, &cfg()).unwrap();
            let f = connection_from_divergence(
                &model,
                &chart,
                alpha,
                1.0,
                None,
                &cfg(),
                MethodPreference::Auto,
            )
            .unwrap();
            conn = conn
                .max(c.max_relative_deviation(&q))
                .max(c.max_relative_deviation(&f))
                .max(q.max_relative_deviation(&f));
        }
    }
    outcome(
        metric <= 1e-4 && conn <= 1e-3 && alpha_dep <= 1e-4,
        format!(
            "metric {metric:.3e} (≤ 1e-4), connection {conn:.3e} (≤ 1e-3), α-dependence {alpha_dep:.3e} (≤ 1e-4)"
        ),
    )
}

fn criterion_7() -> Outcome {
    let grid: Vec<(f64, f64)> = LAMBDAS
        .iter()
        .flat_map(|&a| LAMBDAS.iter().map(move |&b| (a, b)))
        .collect();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut scan = |name: String, m: &LevyMeasure, kind: RhoKind, k: f64, want_negative: bool| {
        let rho = RhoSpec::new(kind, k).unwrap();
        let r = superharmonic_scan(m, &grid, &rho, 1.0, RangePolicy::ReportOnly).unwrap();
        let ok = if want_negative {
            r.all_negative
        } else {
            !r.all_negative
        };
        pass &= ok;
        lines.push(format!(
            "{name}: max Δρ = {:.3e} at {:?} ({})",
            r.worst_value,
            r.worst_point,
            if ok { "ok" } else { "violated" }
        ));
    };
    for a in [0.3, 0.5] {
        let m = LevyMeasure::cts(1.0, a, 1.0, 1.0).unwrap();
        let k = -(1.0 - a) / 2.0;
        scan(format!("CTS a={a} λ+^{k}"), &m, RhoKind::PowerPlus, k, true);
        scan(
            format!("CTS a={a} λ-^{k}"),
            &m,
            RhoKind::PowerMinus,
            k,
            true,
        );
        // outside (a − 1, 0): expected to produce Δρ ≥ 0 somewhere
        scan(
            format!("CTS a={a} λ+^0.5 (outside range)"),
            &m,
            RhoKind::PowerPlus,
            0.5,
            false,
        );
        scan(
            format!("CTS a={a} λ+^{} (outside range)", a - 1.5),
            &m,
            RhoKind::PowerPlus,
            a - 1.5,
            false,
        );
    }
    let vg = LevyMeasure::vg(1.0, 1.0, 1.0).unwrap();
    for k in [-0.5, 0.5] {
        scan(format!("VG (λ+λ-)^{k}"), &vg, RhoKind::Product, k, true);
    }
    outcome(pass, lines.join("; "))
}

fn criterion_8() -> Outcome {
    let mut details = Vec::new();
    let gauss = LevyModel::diffusion(1.0, 0.0).unwrap();
    let grid = density_grid(&gauss, 1.0, DEFAULT_GRID_POINTS, Halfwidth::Auto, &cfg()).unwrap();
    let normal = Normal::new(0.0, 1.0).unwrap();
    let pdf_err = grid
        .points()
        .zip(&grid.pdf)
        .map(|(x, p)| (p - normal.pdf(x)).abs())
        .fold(0.0f64, f64::max);
    details.push(format!("Gaussian pdf max error {pdf_err:.3e} (≤ 1e-6)"));

    let canonical = [
        ("VG", pure(LevyMeasure::vg(1.0, 2.0, 3.0).unwrap())),
        ("CTS", pure(LevyMeasure::cts(1.0, 0.5, 2.0, 3.0).unwrap())),
        (
            "GTS",
            pure(
                LevyMeasure::gts(
                    TemperedSide::new(0.7, 0.4, 2.0),
                    TemperedSide::new(1.2, 1.3, 3.0),
                )
                .unwrap(),
            ),
        ),
    ];
    let mut mass_err = 0.0f64;
    for (_, m) in &canonical {
        let g = density_grid(m, 1.0, DEFAULT_GRID_POINTS, Halfwidth::Auto, &cfg()).unwrap();
        mass_err = mass_err.max((g.mass() - 1.0).abs());
    }
    details.push(format!("normalization error {mass_err:.3e} (≤ 1e-4)"));

    let n = 100_000;
    let vg = &canonical[0].1;
    let s = simulate(vg, 1.0, n, 17, &cfg()).unwrap();
    let bound = 5.0 / (n as f64).sqrt();
    let mut cf_err = 0.0f64;
    for z in [0.5, 1.0, 2.0] {
        let emp: Complex64 = s
            .values
            .iter()
            .map(|&x| Complex64::new(0.0, z * x).exp())
            .sum::<Complex64>()
            / n as f64;
        let exact = characteristic_exponent(vg, z, 1.0, &cfg()).unwrap().exp();
        cf_err = cf_err.max((emp - exact).norm());
    }
    details.push(format!(
        "VG empirical CF error {cf_err:.3e} (≤ {bound:.3e})"
    ));
    outcome(
        pdf_err <= 1e-6 && mass_err <= 1e-4 && cf_err <= bound,
        details.join("; "),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data = simulate(
        &pure(LevyMeasure::vg(1.0, 2.0, 3.0).unwrap()),
        1.0,
        200,
        3,
        &cfg(),
    )
    .unwrap()
    .values;
    let opts = LikelihoodOptions::default();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let (lp, lm) = (rng.random_range(0.5..5.0), rng.random_range(0.5..5.0));
        let m = if i % 2 == 0 {
            LevyMeasure::vg(1.0, lp, lm).unwrap()
        } else {
            LevyMeasure::cts(1.0, 0.5, lp, lm).unwrap()
        };
        let model = pure(m);
        let l = log_likelihood(&model, &data, 1.0, &opts).unwrap();
        let ls = penalized_log_likelihood(&model, &data, 1.0, 200.0, &opts).unwrap();
        let prior = log_jeffreys(&model, 200.0, &cfg()).unwrap();
        worst = worst.max((ls.value - l - prior).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |l* − l − log J| over 20 points: {worst:.3e} (≤ 1e-12)"),
    )
}

fn criterion_10() -> Outcome {
    let cfg = BenchmarkConfig {
        truth: pure(LevyMeasure::vg(1.0, 2.0, 3.0).unwrap()),
        t: 1.0,
        n_per_replicate: 500,
        replicates: 200,
        seed: 2024,
        fit: FitOptions::default(),
    };
    let threads = threads_from_env().unwrap();
    let mut reports = Vec::new();
    let mut slowest = Duration::ZERO;
    for _ in 0..2 {
        let start = Instant::now();
        let report = parallel_bias_benchmark(&cfg, threads).unwrap();
        slowest = slowest.max(start.elapsed());
        reports.push(report);
    }
    let text: Vec<String> = reports
        .iter()
        .map(|r| json::to_string(&report_json(r)))
        .collect();
    let r = &reports[0];
    outcome(
        text[0] == text[1] && slowest <= Duration::from_secs(600),
        format!(
            "identical reports: {}; slowest run {:.0} s (≤ 600 s); failures {}/{}; bias plain ({:+.4}, {:+.4}), penalized ({:+.4}, {:+.4}); rmse plain ({:.4}, {:.4}), penalized ({:.4}, {:.4})",
            text[0] == text[1],
            slowest.as_secs_f64(),
            r.failures,
            r.replicates,
            r.mean_bias_plain[0],
            r.mean_bias_plain[1],
            r.mean_bias_penalized[0],
            r.mean_bias_penalized[1],
            r.rmse_plain[0],
            r.rmse_plain[1],
            r.rmse_penalized[0],
            r.rmse_penalized[1],
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, check) in criterion_list(&criteria) {
        let o = check();
        println!(
            "criterion {n:>2}: {} — {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

/// `LEVY_IG_ACCEPTANCE=1,4,9` restricts the run to the listed criteria.
fn criterion_list(all: &[Criterion]) -> Vec<Criterion> {
    match std::env::var("LEVY_IG_ACCEPTANCE") {
        Ok(list) => {
            let wanted: Vec<u32> = list
                .split(',')
                .filter_map(|s| s.trim().parse().ok())
                .collect();
            all.iter()
                .copied()
                .filter(|(n, _)| wanted.contains(n))
                .collect()
        }
        Err(_) => all.to_vec(),
    }
}
