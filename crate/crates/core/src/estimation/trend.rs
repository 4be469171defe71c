//! Penalized estimation of a location trend observed at irregular times.
//!
//! Maximizes `Σ ℓ_i(g_i) - λ Σ (Δ² g)_j²` where `Δ²` is the second divided
//! difference rescaled by the squared mean spacing, so on an even grid it is
//! the plain second difference `g_{j+2} - 2 g_{j+1} + g_j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{BevmError, Result};

/// Newton settings for [`trend_penalized`].
#[derive(Debug, Clone, Copy)]
pub struct TrendOptions {
    pub max_iter: usize,
    /// Convergence threshold on the sup-norm of the accepted step.
    pub step_tol: f64,
    /// Floor for the curvature weights `-ℓ_i''`.
    pub min_weight: f64,
}

impl Default for TrendOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            step_tol: 1e-10,
            min_weight: 1e-8,
        }
    }
}

/// Rows of the scaled second-difference operator for `times`.
pub fn second_difference_rows(times: &[f64]) -> Vec<[(usize, f64); 3]> {
    let n = times.len();
    if n < 3 {
        return vec![];
    }
    let mean_h = (times[n - 1] - times[0]) / (n - 1) as f64;
    (0..n - 2)
        .map(|j| {
            let h1 = times[j + 1] - times[j];
            let h2 = times[j + 2] - times[j + 1];
            let scale = mean_h * mean_h * 2.0 / (h1 + h2);
            [
                (j, scale / h1),
                (j + 1, -scale * (1.0 / h1 + 1.0 / h2)),
                (j + 2, scale / h2),
            ]
        })
        .collect()
}

/// `Σ (Δ² g)²` on the given time grid.
pub fn roughness(g: &[f64], times: &[f64]) -> f64 {
    second_difference_rows(times)
        .iter()
        .map(|row| row.iter().map(|&(i, w)| w * g[i]).sum::<f64>().powi(2))
        .sum()
}

fn penalty_matrix(times: &[f64]) -> DMatrix<f64> {
    let n = times.len();
    let mut k = DMatrix::zeros(n, n);
    for row in second_difference_rows(times) {
        for &(i, wi) in &row {
            for &(j, wj) in &row {
                k[(i, j)] += wi * wj;
            }
        }
    }
    k
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 3 {
        return Err(BevmError::input(format!(
            "trend estimation needs at least 3 times, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BevmError::input("times must be strictly increasing"));
    }
    Ok(())
}

/// Central first and second derivatives of a scalar function, shrinking the
/// step when a neighbour is not finite.
fn derivatives<F: Fn(f64) -> f64>(f: &F, g: f64, f0: f64) -> Option<(f64, f64)> {
    let mut h = 1e-4 * (1.0 + g.abs());
    for _ in 0..4 {
        let (fp, fm) = (f(g + h), f(g - h));
        if fp.is_finite() && fm.is_finite() {
            return Some(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)));
        }
        h *= 0.1;
    }
    None
}

/// Maximizes `Σ_i ℓ(i, g_i) - λ Σ (Δ² g)²` from `start` by damped Newton
/// steps with numerical per-point derivatives. `ℓ` may return `-inf` for
/// infeasible values; such trial steps are halved until feasible.
pub fn trend_penalized<L: Fn(usize, f64) -> f64>(
    ell: L,
    lambda: f64,
    times: &[f64],
    start: &[f64],
    opts: &TrendOptions,
) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(BevmError::param(format!("lambda must be >= 0, got {lambda}")));
    }
    check_times(times)?;
    let n = times.len();
    if start.len() != n {
        return Err(BevmError::input("start vector length differs from times"));
    }
    let k = penalty_matrix(times);
    let objective = |g: &[f64]| -> f64 {
        let mut total = 0.0;
        for (i, &gi) in g.iter().enumerate() {
            let l = ell(i, gi);
            if !l.is_finite() {
                return f64::NEG_INFINITY;
            }
            total += l;
        }
        total - lambda * roughness(g, times)
    };

    let mut g = start.to_vec();
    let mut current = objective(&g);
    if !current.is_finite() {
        return Err(BevmError::input("trend start point is infeasible"));
    }
    for _ in 0..opts.max_iter {
        let mut grad = DVector::zeros(n);
        let mut hess = &k * (2.0 * lambda);
        for i in 0..n {
            let f = |v: f64| ell(i, v);
            let f0 = f(g[i]);
            let (d1, d2) = derivatives(&f, g[i], f0).unwrap_or((0.0, 1.0 / opts.min_weight));
            grad[i] = d1;
            hess[(i, i)] += (-d2).max(opts.min_weight);
        }
        let gv = DVector::from_column_slice(&g);
        grad -= &k * &gv * (2.0 * lambda);
        let chol = hess.cholesky().ok_or_else(|| BevmError::Numeric {
            message: "penalized trend system is not positive definite".into(),
            achieved: f64::NAN,
        })?;
        let step = chol.solve(&grad);

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = g.iter().zip(step.iter()).map(|(a, d)| a + scale * d).collect();
            let value = objective(&trial);
            if value.is_finite() && value >= current {
                accepted = Some((trial, value));
                break;
            }
            scale *= 0.5;
        }
        let Some((trial, value)) = accepted else {
            break;
        };
        let moved = step.amax() * scale;
        g = trial;
        current = value;
        if moved <= opts.step_tol * (1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn zero_penalty_interpolates() {
        let t = grid(12);
        let m: Vec<f64> = t.iter().map(|v| (7.0 * v).sin() * 3.0).collect();
        let g = trend_penalized(|i, g| -0.5 * (g - m[i]).powi(2), 0.0, &t, &vec![0.0; 12], &TrendOptions::default())
            .unwrap();
        for (a, b) in g.iter().zip(&m) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn huge_penalty_gives_line() {
        let t = grid(30);
        let m: Vec<f64> = t.iter().map(|v| 2.0 - 5.0 * v + (13.0 * v).cos()).collect();
        let g = trend_penalized(|i, g| -0.5 * (g - m[i]).powi(2), 1e8, &t, &vec![0.0; 30], &TrendOptions::default())
            .unwrap();
        // least-squares line through m
        let n = t.len() as f64;
        let (st, sm) = (t.iter().sum::<f64>(), m.iter().sum::<f64>());
        let stt: f64 = t.iter().map(|v| v * v).sum();
        let stm: f64 = t.iter().zip(&m).map(|(a, b)| a * b).sum();
        let slope = (n * stm - st * sm) / (n * stt - st * st);
        let icept = (sm - slope * st) / n;
        for (gi, ti) in g.iter().zip(&t) {
            assert!((gi - (icept + slope * ti)).abs() < 1e-5, "{} vs {}", gi, icept + slope * ti);
        }
    }

    #[test]
    fn quadratic_matches_ridge_solve() {
        let t = vec![0.0, 0.1, 0.25, 0.3, 0.55, 0.6, 0.8, 1.0];
        let n = t.len();
        let m = [1.0, 3.0, -2.0, 0.5, 4.0, 4.5, 1.0, -1.0];
        let w = [1.0, 2.0, 0.5, 1.5, 1.0, 3.0, 0.7, 1.2];
        let lambda = 0.8;
        let g = trend_penalized(
            |i, g| -0.5 * w[i] * (g - m[i]).powi(2),
            lambda,
            &t,
            &vec![0.0; n],
            &TrendOptions::default(),
        )
        .unwrap();
        // independent solve of (W + 2 λ D'D) g = W m with an explicit D
        let mut d = DMatrix::zeros(n - 2, n);
        for (r, row) in second_difference_rows(&t).iter().enumerate() {
            for &(i, v) in row {
                d[(r, i)] = v;
            }
        }
        let wm = DMatrix::from_diagonal(&DVector::from_column_slice(&w));
        let a = &wm + d.transpose() * &d * (2.0 * lambda);
        let rhs = &wm * DVector::from_column_slice(&m);
        let exact = a.lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert!((g[i] - exact[i]).abs() < 1e-8, "{i}: {} vs {}", g[i], exact[i]);
        }
    }

    #[test]
    fn even_grid_uses_plain_second_differences() {
        let t = grid(5);
        let g = [0.0, 1.0, 4.0, 9.0, 16.0];
        assert!((roughness(&g, &t) - 12.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = |_: usize, g: f64| -g * g;
        assert!(trend_penalized(f, 1.0, &[0.0, 1.0], &[0.0, 0.0], &TrendOptions::default()).is_err());
        assert!(trend_penalized(f, -1.0, &grid(4), &[0.0; 4], &TrendOptions::default()).is_err());
    }
}
