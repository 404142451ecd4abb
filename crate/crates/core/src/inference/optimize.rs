use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows this when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Converged when the simplex diameter is below `x_tol·max(1, ‖x_best‖∞)`…
    pub x_tol: f64,
    /// …and the objective spread below `f_tol`.
    pub f_tol: f64,
    /// Initial edge length relative to `max(|x0_i|, 1e-3)`.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            x_tol: 1e-6,
            f_tol: 1e-8,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Maximizes `f` over a box by Nelder–Mead with trial points projected onto
/// the box. NaN and `−∞` are treated as the worst possible value.
pub fn maximize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let d = x0.len();
    // minimize g = −f internally
    let mut g = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let mut start = x0.to_vec();
    project(&mut start, bounds);
    let v = g(&start);
    simplex.push((start.clone(), v));
    for i in 0..d {
        let mut x = start.clone();
        let step = opts.initial_step * start[i].abs().max(1e-3);
        x[i] += step;
        if x[i] > bounds[i].1 {
            x[i] = start[i] - step;
        }
        project(&mut x, bounds);
        let v = g(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| {
        a.1.total_cmp(&b.1)
            .then_with(|| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal))
    };
    while iterations < opts.max_iterations {
        simplex.sort_by(by_value);
        let best = &simplex[0];
        let scale = best.0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = simplex[d].1 - best.1;
        if best.1.is_finite() && diameter < opts.x_tol * scale && spread < opts.f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|(x, _)| x[i]).sum::<f64>() / d as f64)
            .collect();
        let along = |coef: f64, worst: &[f64]| {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            project(&mut x, bounds);
            x
        };
        let worst = simplex[d].clone();
        let xr = along(1.0, &worst.0);
        let fr = g(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0, &worst.0);
            let fe = g(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(0.5, &worst.0);
            let v = g(&x);
            (x, v)
        } else {
            let x = along(-0.5, &worst.0);
            let v = g(&x);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = best_x
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            project(&mut x, bounds);
            let v = g(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(by_value);
    let (x, v) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value: -v,
        iterations,
        converged,
    }
}
