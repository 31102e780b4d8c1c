use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NelderMeadOptions {
    pub max_evaluations: usize,
    /// Stop once the best value improved by less than `stall_tolerance`
    /// over this many iterations.
    pub stall_iterations: usize,
    pub stall_tolerance: f64,
    /// Initial simplex edge relative to each coordinate.
    pub initial_step: f64,
    /// Restarts from the best vertex with a fresh simplex after a stall.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 5000,
            stall_iterations: 50,
            stall_tolerance: 1e-10,
            initial_step: 0.1,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: [f64; 8],
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// False when the evaluation budget ran out before the stall criterion.
    pub converged: bool,
}

const N: usize = 8;

fn lerp(a: &[f64; N], b: &[f64; N], t: f64) -> [f64; N] {
    std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))
}

/// Nelder-Mead where every trial point passes through `project` before it is
/// evaluated, so the search never leaves the feasible set.
pub fn nelder_mead(
    f: &(impl Fn(&[f64; N]) -> f64 + Sync),
    x0: [f64; N],
    project: impl Fn(&[f64; N]) -> [f64; N],
    opts: &NelderMeadOptions,
) -> NelderMeadOutcome {
    let mut evals = 0usize;
    let eval = |x: &[f64; N], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best_x = project(&x0);
    let mut best_v = eval(&best_x, &mut evals);
    let mut iterations = 0usize;
    let mut converged = false;

    for round in 0..=opts.restarts {
        if evals >= opts.max_evaluations {
            break;
        }
        let start_v = best_v;
        // simplex around the current best
        let mut simplex: Vec<([f64; N], f64)> = vec![(best_x, best_v)];
        for i in 0..N {
            let mut v = best_x;
            let step = opts.initial_step * if v[i].abs() > 1e-3 { v[i].abs() } else { 1e-3 };
            v[i] += step;
            let mut p = project(&v);
            if p == best_x {
                v[i] = best_x[i] - step;
                p = project(&v);
            }
            let fv = eval(&p, &mut evals);
            simplex.push((p, fv));
        }
        let mut history_best = Vec::new();
        converged = false;
        while evals < opts.max_evaluations {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            history_best.push(simplex[0].1);
            if history_best.len() > opts.stall_iterations {
                let old = history_best[history_best.len() - 1 - opts.stall_iterations];
                if old - simplex[0].1 < opts.stall_tolerance {
                    converged = true;
                    break;
                }
            }
            let centroid: [f64; N] =
                std::array::from_fn(|i| simplex[..N].iter().map(|(x, _)| x[i]).sum::<f64>() / N as f64);
            let (worst, fw) = simplex[N];
            let reflect = project(&lerp(&centroid, &worst, -1.0));
            let fr = eval(&reflect, &mut evals);
            if fr < simplex[0].1 {
                let expand = project(&lerp(&centroid, &worst, -2.0));
                let fe = eval(&expand, &mut evals);
                simplex[N] = if fe < fr { (expand, fe) } else { (reflect, fr) };
                continue;
            }
            if fr < simplex[N - 1].1 {
                simplex[N] = (reflect, fr);
                continue;
            }
            let (contract, fc) = if fr < fw {
                let c = project(&lerp(&centroid, &reflect, 0.5));
                let v = eval(&c, &mut evals);
                (c, v)
            } else {
                let c = project(&lerp(&centroid, &worst, 0.5));
                let v = eval(&c, &mut evals);
                (c, v)
            };
            if fc < fw.min(fr) {
                simplex[N] = (contract, fc);
                continue;
            }
            let best = simplex[0].0;
            for vertex in simplex.iter_mut().skip(1) {
                let p = project(&lerp(&best, &vertex.0, 0.5));
                *vertex = (p, eval(&p, &mut evals));
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_v {
            best_x = simplex[0].0;
            best_v = simplex[0].1;
        }
        // a restart that gains nothing ends the search
        if start_v - best_v < opts.stall_tolerance && round > 0 {
            break;
        }
    }
    NelderMeadOutcome {
        x: best_x,
        value: best_v,
        evaluations: evals,
        iterations,
        converged,
    }
}
