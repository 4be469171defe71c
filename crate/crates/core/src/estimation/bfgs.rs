//! Quasi-Newton minimization with numerical gradients. Trial points whose
//! objective is not finite are treated as infeasible and shrink the step.

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when the sup-norm of the gradient falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step improves `f` by less than `f_tol (1 + |f|)`.
    pub f_tol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            grad_tol: 1e-7,
            f_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-difference gradient; falls back to a one-sided difference next to
/// an infeasible region and to zero when both sides are infeasible.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], fx: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 1e-6 * (1.0 + x[i].abs());
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - fx) / h,
                (false, true) => (fx - fm) / h,
                (false, false) => 0.0,
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` from `x0`, which must be feasible.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &BfgsOptions) -> BfgsOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = numeric_gradient(&f, &x, fx);
    // inverse Hessian approximation, row-major
    let mut h = identity(n);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it + 1;
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < opts.grad_tol {
            converged = true;
            break;
        }
        let mut dir: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            // lost descent: restart from steepest descent
            h = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
        }
        let mut accepted = line_search(&f, &x, fx, &dir, slope);
        if accepted.as_ref().is_none_or(|a| a.2 < 1e-6) {
            // blocked by an infeasible region: retry along steepest descent
            // with one coordinate frozen at a time and keep the best step
            for j in 0..=n {
                let alt: Vec<f64> = (0..n).map(|i| if i == j { 0.0 } else { -g[i] }).collect();
                let alt_slope = dot(&alt, &g);
                if !(alt_slope < 0.0) {
                    continue;
                }
                if let Some(cand) = line_search(&f, &x, fx, &alt, alt_slope) {
                    if accepted.as_ref().is_none_or(|a| cand.1 < a.1) {
                        accepted = Some(cand);
                        h = identity(n);
                    }
                }
            }
        }
        let Some((xn, fnew, _)) = accepted else {
            converged = true;
            break;
        };
        let gn = numeric_gradient(&f, &xn, fnew);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let improvement = fx - fnew;
        x = xn;
        g = gn;
        let previous = fx;
        fx = fnew;
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            bfgs_update(&mut h, &s, &y, sy);
        } else {
            h = identity(n);
        }
        if improvement <= opts.f_tol * (1.0 + previous.abs()) {
            converged = true;
            break;
        }
    }
    BfgsOutcome {
        x,
        f: fx,
        iterations,
        converged,
    }
}

/// Armijo backtracking; returns the accepted point, its value and the step.
fn line_search<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &[f64],
    fx: f64,
    dir: &[f64],
    slope: f64,
) -> Option<(Vec<f64>, f64, f64)> {
    let mut t = 1.0;
    for _ in 0..60 {
        let trial: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
        let ft = f(&trial);
        if ft.is_finite() && ft <= fx + 1e-4 * t * slope {
            return Some((trial, ft, t));
        }
        t *= 0.5;
    }
    None
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// `H <- (I - ρ s y') H (I - ρ y s') + ρ s s'`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
