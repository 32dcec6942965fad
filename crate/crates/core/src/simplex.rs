//! Nelder–Mead downhill simplex in two dimensions.

use alloc::vec::Vec;

/// Stopping rules for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within this distance of the best.
    pub diameter_tol: f64,
    pub max_iterations: usize,
    /// Size of the initial simplex along each axis.
    pub initial_step: [f64; 2],
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            diameter_tol: 1e-4,
            max_iterations: 500,
            initial_step: [0.05, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub best: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    crate::math::sqrt(dx * dx + dy * dy)
}

fn lerp(a: &[f64; 2], b: &[f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Minimize `f` starting from `start`. `project` maps every trial point into
/// the feasible set (e.g. clamping a coordinate at zero) before evaluation.
/// The returned point is never worse than `start`.
pub fn minimize<F, P>(mut f: F, project: P, start: [f64; 2], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut([f64; 2]) -> f64,
    P: Fn([f64; 2]) -> [f64; 2],
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let mut evaluations = 0;
    let mut eval = |x: [f64; 2]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let start = project(start);
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    simplex.push((start, eval(start)));
    for axis in 0..2 {
        let mut p = start;
        p[axis] += opts.initial_step[axis];
        let mut q = project(p);
        if dist(&q, &start) < 1e-12 {
            // projected back onto the start: step the other way
            p[axis] = start[axis] - opts.initial_step[axis];
            q = project(p);
        }
        simplex.push((q, eval(q)));
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| dist(p, &simplex[0].0))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (best, worst) = (simplex[0], simplex[2]);
        let centroid = lerp(&simplex[0].0, &simplex[1].0, 0.5);
        let reflected = project(lerp(&centroid, &worst.0, -REFLECT));
        let fr = eval(reflected);
        if fr < best.1 {
            let expanded = project(lerp(&centroid, &worst.0, -EXPAND));
            let fe = eval(expanded);
            simplex[2] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[1].1 {
            simplex[2] = (reflected, fr);
        } else {
            let (towards, f_ref) = if fr < worst.1 {
                (reflected, fr)
            } else {
                (worst.0, worst.1)
            };
            let contracted = project(lerp(&centroid, &towards, CONTRACT));
            let fc = eval(contracted);
            if fc < f_ref {
                simplex[2] = (contracted, fc);
            } else {
                for i in 1..3 {
                    let p = project(lerp(&best.0, &simplex[i].0, SHRINK));
                    simplex[i] = (p, eval(p));
                }
            }
        }
        let current = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        trace.push(current);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        best: simplex[0].0,
        value: simplex[0].1,
        iterations,
        evaluations,
        converged,
        trace,
    }
}
