//! Limited-memory BFGS ascent used for hyperparameter fitting.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AscentConfig {
    pub max_iter: usize,
    /// Stop once `|Δf| / max(|f|, 1)` falls below this.
    pub rel_tol: f64,
    pub history: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { max_iter: 200, rel_tol: 1e-5, history: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximises `f` from `x0`. `f` returns the value and gradient, or `None`
/// where it is undefined (the line search backs away from such points).
/// Returns `None` only if `f` is undefined at `x0`.
pub fn maximize<F>(mut f: F, x0: Vec<f64>, cfg: AscentConfig) -> Option<AscentResult>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let eval = |f: &mut F, x: &[f64]| f(x).filter(|(v, g)| v.is_finite() && g.iter().all(|d| d.is_finite()));
    let (mut fx, mut gx) = eval(&mut f, &x0)?;
    let mut x = x0;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let dim = x.len();

    for iter in 0..cfg.max_iter {
        // two-loop recursion on the ascent direction
        let mut q = gx.clone();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for k in 0..dim {
                q[k] -= a * y[k];
            }
            alphas.push(a);
        }
        let gamma = match pairs.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / dot(&gx, &gx).sqrt().max(1.0),
        };
        for v in &mut q {
            *v *= gamma;
        }
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for k in 0..dim {
                q[k] += s[k] * (a - b);
            }
        }
        let mut dir = q;
        let mut slope = dot(&gx, &dir);
        if !(slope > 0.0) {
            pairs.clear();
            dir = gx.clone();
            let scale = 1.0 / dot(&gx, &gx).sqrt().max(1.0);
            dir.iter_mut().for_each(|d| *d *= scale);
            slope = dot(&gx, &dir);
            if !(slope > 0.0) {
                return Some(AscentResult { x, value: fx, iterations: iter, converged: true });
            }
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            if let Some((ft, gt)) = eval(&mut f, &trial) {
                if ft >= fx + 1e-4 * step * slope {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            return Some(AscentResult { x, value: fx, iterations: iter, converged: true });
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // ascent on f is descent on -f: curvature pair uses -(Δg)
        let y: Vec<f64> = gx.iter().zip(&gnew).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if pairs.len() == cfg.history {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        let change = (fnew - fx).abs() / fx.abs().max(1.0);
        x = xn;
        fx = fnew;
        gx = gnew;
        if change < cfg.rel_tol {
            return Some(AscentResult { x, value: fx, iterations: iter + 1, converged: true });
        }
    }
    Some(AscentResult { x, value: fx, iterations: cfg.max_iter, converged: false })
}
