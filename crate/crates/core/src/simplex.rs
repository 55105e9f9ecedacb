//! Box-constrained Nelder–Mead simplex minimization.
//!
//! Trial points are projected onto the box. Non-finite objective values are
//! treated as `+∞`, so a failed evaluation is simply never accepted.

use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop when every vertex is within this distance (∞-norm) of the best.
    pub xatol: f64,
    /// ...and every vertex value is within this of the best value.
    pub fatol: f64,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iters: 200,
            xatol: 1e-4,
            fatol: 1e-8,
            initial_step: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value at the start of every iteration, plus the final best.
    /// Non-increasing.
    pub trace: Vec<f64>,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.max(*lo).min(*hi);
    }
}

pub fn minimize<F>(
    mut objective: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bounds must match the start point");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut start = x0.to_vec();
    clamp_into(&mut start, lower, upper);
    let mut simplex: Vec<Vertex> = Vec::with_capacity(n + 1);
    simplex.push(Vertex {
        f: eval(&start),
        x: start.clone(),
    });
    for i in 0..n {
        let mut x = start.clone();
        let step = if x[i] + opts.initial_step <= upper[i] {
            opts.initial_step
        } else {
            -opts.initial_step
        };
        x[i] += step;
        clamp_into(&mut x, lower, upper);
        simplex.push(Vertex { f: eval(&x), x });
    }

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let point = |base: &[f64], dir_from: &[f64], t: f64| -> Vec<f64> {
        // base + t (base - dir_from)
        let mut p: Vec<f64> = base.iter().zip(dir_from).map(|(b, d)| b + t * (b - d)).collect();
        clamp_into(&mut p, lower, upper);
        p
    };

    while iterations < opts.max_iters {
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        trace.push(simplex[0].f);
        let best = &simplex[0];
        let fspread = simplex.iter().map(|v| (v.f - best.f).abs()).fold(0.0, f64::max);
        let xspread = simplex
            .iter()
            .flat_map(|v| v.x.iter().zip(&best.x).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if fspread <= opts.fatol && xspread <= opts.xatol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = alloc::vec![0.0; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi / n as f64;
            }
        }
        let worst_f = simplex[n].f;
        let second_f = simplex[n - 1].f.max(simplex[0].f);

        let xr = point(&centroid, &simplex[n].x, 1.0);
        let fr = eval(&xr);
        if fr < simplex[0].f {
            let xe = point(&centroid, &simplex[n].x, 2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr {
                Vertex { x: xe, f: fe }
            } else {
                Vertex { x: xr, f: fr }
            };
            continue;
        }
        if fr < second_f || (n == 1 && fr < worst_f) {
            simplex[n] = Vertex { x: xr, f: fr };
            continue;
        }
        let (xc, fc, accept) = if fr < worst_f {
            let xc = point(&centroid, &simplex[n].x, 0.5);
            let fc = eval(&xc);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = point(&centroid, &simplex[n].x, -0.5);
            let fc = eval(&xc);
            let ok = fc < worst_f;
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = Vertex { x: xc, f: fc };
            continue;
        }
        // Shrink toward the best vertex.
        let best_x = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            for (xi, bi) in v.x.iter_mut().zip(&best_x) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            v.f = eval(&v.x);
        }
    }
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    let best = simplex.swap_remove(0);
    trace.push(best.f);
    Minimum {
        x: best.x,
        value: best.f,
        iterations,
        evaluations,
        converged,
        trace,
    }
}
