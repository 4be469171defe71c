//! Penalized maximum likelihood for the restricted logistic model with GEVM
//! margins sharing a shape and carrying nonparametric location trends.
//!
//! The boundary `c` is not a free parameter: it is implied by the margins at
//! every time, and the largest per-time value is used. Points falling in the
//! zero-density region under trial parameters make the likelihood `-inf`.

use serde::{Deserialize, Serialize};

use super::bfgs::{self, BfgsOptions};
use super::pickands::estimate_c_hat;
use super::trend::{roughness, trend_penalized, TrendOptions};
use crate::dependence::{DependenceModel, RestrictedLogisticParams};
use crate::error::{BevmError, Result};
use crate::margins::{GevmParams, TrendSpec, TrendingMargin};
use crate::measure::{boundary_common_shape, joint_log_density_gevm, ExpPair};
use crate::series::{BivariateSeries, MarginScale};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const START_SHAPES: [f64; 6] = [0.1, 0.05, 0.2, 0.02, 0.3, 0.01];
const START_S: f64 = 1.5;

/// Scalars and trends of a restricted-logistic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitStart {
    pub s: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub xi: f64,
    pub g_x: Vec<f64>,
    pub g_y: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Outer iterations of (trend update, quasi-Newton update).
    pub max_iter: usize,
    /// Relative improvement of the penalized log-likelihood that ends the loop.
    pub tol: f64,
    pub start: Option<FitStart>,
    pub bfgs: BfgsOptions,
    pub trend: TrendOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-12,
            start: None,
            bfgs: BfgsOptions::default(),
            trend: TrendOptions {
                max_iter: 50,
                ..TrendOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub s: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub xi: f64,
    pub c: f64,
    pub penalized_loglik: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub s: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub xi: f64,
    pub g_x: Vec<f64>,
    pub g_y: Vec<f64>,
    /// Boundary implied by the fitted margins.
    pub c_hat: f64,
    /// Minimum y-fraction of the data mapped through the fitted margins.
    pub c_hat_pickands: f64,
    pub trace: Vec<TraceRow>,
    /// Final penalized log-likelihood.
    pub loglik: f64,
    pub loglik_unpenalized: f64,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warning: Option<String>,
}

impl FitResult {
    pub fn margin_x(&self) -> Result<TrendingMargin> {
        trending(self.g_x.clone(), self.sigma_x, self.xi)
    }

    pub fn margin_y(&self) -> Result<TrendingMargin> {
        trending(self.g_y.clone(), self.sigma_y, self.xi)
    }

    pub fn model(&self) -> Result<DependenceModel> {
        Ok(DependenceModel::Restricted(RestrictedLogisticParams::new(
            self.c_hat, self.s,
        )?))
    }

    pub fn as_start(&self) -> FitStart {
        FitStart {
            s: self.s,
            sigma_x: self.sigma_x,
            sigma_y: self.sigma_y,
            xi: self.xi,
            g_x: self.g_x.clone(),
            g_y: self.g_y.clone(),
        }
    }
}

fn trending(g: Vec<f64>, sigma: f64, xi: f64) -> Result<TrendingMargin> {
    let base = GevmParams::new(g.first().copied().unwrap_or(0.0), sigma, xi)?;
    Ok(TrendingMargin {
        base,
        trend: TrendSpec::Tabulated(g),
    })
}

/// Scalar parameters in the unconstrained coordinates used by the optimizer.
#[derive(Debug, Clone, Copy)]
struct Scalars {
    s: f64,
    sigma_x: f64,
    sigma_y: f64,
    xi: f64,
}

impl Scalars {
    fn to_vec(self) -> [f64; 4] {
        [(self.s - 1.0).ln(), self.sigma_x.ln(), self.sigma_y.ln(), self.xi]
    }

    fn from_slice(v: &[f64]) -> Self {
        Self {
            s: 1.0 + v[0].exp(),
            sigma_x: v[1].exp(),
            sigma_y: v[2].exp(),
            xi: v[3],
        }
    }
}

struct Problem<'a> {
    t: &'a [f64],
    x: &'a [f64],
    y: &'a [f64],
    lambda_x: f64,
    lambda_y: f64,
}

impl Problem<'_> {
    /// Per-time boundary, `None` when the margins admit no ordered model.
    fn point_c(&self, th: &Scalars, gx: f64, gy: f64) -> Option<f64> {
        let mx = GevmParams::new(gx, th.sigma_x, th.xi).ok()?;
        let my = GevmParams::new(gy, th.sigma_y, th.xi).ok()?;
        let b = boundary_common_shape(&mx, &my).ok()?;
        (!b.degenerate && b.c >= 0.0).then_some(b.c)
    }

    fn point_loglik(&self, i: usize, th: &Scalars, gx: f64, gy: f64, c: f64) -> f64 {
        let model = match RestrictedLogisticParams::new(c, th.s) {
            Ok(p) => DependenceModel::Restricted(p),
            Err(_) => return f64::NEG_INFINITY,
        };
        let (Ok(mx), Ok(my)) = (
            GevmParams::new(gx, th.sigma_x, th.xi),
            GevmParams::new(gy, th.sigma_y, th.xi),
        ) else {
            return f64::NEG_INFINITY;
        };
        joint_log_density_gevm(self.x[i], self.y[i], &mx, &my, &model).unwrap_or(f64::NEG_INFINITY)
    }

    fn boundary(&self, th: &Scalars, gx: &[f64], gy: &[f64]) -> Option<f64> {
        let mut c = 0.0f64;
        for i in 0..gx.len() {
            c = c.max(self.point_c(th, gx[i], gy[i])?);
        }
        Some(c)
    }

    fn loglik(&self, th: &Scalars, gx: &[f64], gy: &[f64]) -> f64 {
        let Some(c) = self.boundary(th, gx, gy) else {
            return f64::NEG_INFINITY;
        };
        let mut total = 0.0;
        for i in 0..gx.len() {
            let l = self.point_loglik(i, th, gx[i], gy[i], c);
            if !l.is_finite() {
                return f64::NEG_INFINITY;
            }
            total += l;
        }
        total
    }

    fn penalty(&self, gx: &[f64], gy: &[f64]) -> f64 {
        self.lambda_x * roughness(gx, self.t) + self.lambda_y * roughness(gy, self.t)
    }

    fn objective(&self, th: &Scalars, gx: &[f64], gy: &[f64]) -> f64 {
        let l = self.loglik(th, gx, gy);
        if l.is_finite() {
            l - self.penalty(gx, gy)
        } else {
            l
        }
    }

    /// Largest and second-largest per-time boundaries with the argmax, so
    /// the boundary with one time changed is cheap to recompute.
    fn top_two(&self, th: &Scalars, gx: &[f64], gy: &[f64]) -> Option<(f64, usize, f64)> {
        let (mut best, mut at, mut second) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY);
        for i in 0..gx.len() {
            let c = self.point_c(th, gx[i], gy[i])?;
            if c > best {
                second = best;
                best = c;
                at = i;
            } else if c > second {
                second = c;
            }
        }
        Some((best, at, second))
    }

    /// Updates one trend with the other held fixed.
    fn update_trend(
        &self,
        th: &Scalars,
        gx: &[f64],
        gy: &[f64],
        which_x: bool,
        opts: &TrendOptions,
    ) -> Result<Vec<f64>> {
        let Some((best, at, second)) = self.top_two(th, gx, gy) else {
            return Err(BevmError::input("current trend is infeasible"));
        };
        let ell = |i: usize, g: f64| {
            let (gxi, gyi) = if which_x { (g, gy[i]) } else { (gx[i], g) };
            let Some(ci) = self.point_c(th, gxi, gyi) else {
                return f64::NEG_INFINITY;
            };
            let rest = if i == at { second } else { best };
            let c = ci.max(rest).max(0.0);
            if c > best {
                // a boundary increase changes every other term as well
                return f64::NEG_INFINITY;
            }
            self.point_loglik(i, th, gxi, gyi, c)
        };
        let (lambda, start) = if which_x {
            (self.lambda_x, gx)
        } else {
            (self.lambda_y, gy)
        };
        trend_penalized(ell, lambda, self.t, start, opts)
    }
}

fn check_series(series: &BivariateSeries) -> Result<()> {
    if series.scale != MarginScale::Original {
        return Err(BevmError::input("fitting expects data on the original scale"));
    }
    if series.len() < 3 {
        return Err(BevmError::input("need at least 3 observations to fit"));
    }
    if let Some(row) = series.first_unordered() {
        return Err(BevmError::input(format!(
            "series is not ordered: x >= y at row {row}"
        )));
    }
    if series.t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(BevmError::input("times must be strictly increasing"));
    }
    Ok(())
}

fn initial_start(problem: &Problem, opts: &TrendOptions) -> Result<FitStart> {
    let smooth = |v: &[f64], lambda: f64| -> Result<(Vec<f64>, f64)> {
        let g = trend_penalized(|i, g| -0.5 * (v[i] - g).powi(2), lambda, problem.t, v, opts)?;
        let n = v.len() as f64;
        let ss: f64 = v.iter().zip(&g).map(|(a, b)| (a - b).powi(2)).sum();
        Ok((g, (ss / n).sqrt().max(1e-8)))
    };
    let (mean_x, sd_x) = smooth(problem.x, problem.lambda_x)?;
    let (mean_y, sd_y) = smooth(problem.y, problem.lambda_y)?;
    let root6_pi = 6f64.sqrt() / std::f64::consts::PI;
    let (sigma_x, sigma_y) = (sd_x * root6_pi, sd_y * root6_pi);
    for &xi in &START_SHAPES {
        // location from the mean: mean = mu + (sigma/xi)(1 - Gamma(1 - xi))
        let offset = |sigma: f64| {
            if xi == 0.0 {
                EULER_GAMMA * sigma
            } else {
                -(sigma / xi) * (1.0 - statrs::function::gamma::gamma(1.0 - xi))
            }
        };
        let g_x: Vec<f64> = mean_x.iter().map(|m| m + offset(sigma_x)).collect();
        let g_y: Vec<f64> = mean_y.iter().map(|m| m + offset(sigma_y)).collect();
        let th = Scalars {
            s: START_S,
            sigma_x,
            sigma_y,
            xi,
        };
        if problem.objective(&th, &g_x, &g_y).is_finite() {
            return Ok(FitStart {
                s: START_S,
                sigma_x,
                sigma_y,
                xi,
                g_x,
                g_y,
            });
        }
    }
    Err(BevmError::input(
        "no feasible starting point: the data are incompatible with an ordered model at the trial shapes",
    ))
}

/// Penalized likelihood fit with roughness weights `lambda_x`, `lambda_y`.
pub fn fit_restricted(
    series: &BivariateSeries,
    lambda_x: f64,
    lambda_y: f64,
    config: &FitConfig,
) -> Result<FitResult> {
    check_series(series)?;
    for (name, l) in [("lambda_x", lambda_x), ("lambda_y", lambda_y)] {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(BevmError::param(format!("{name} must be >= 0, got {l}")));
        }
    }
    let problem = Problem {
        t: &series.t,
        x: &series.x,
        y: &series.y,
        lambda_x,
        lambda_y,
    };
    let start = match &config.start {
        Some(s) => {
            if s.g_x.len() != series.len() || s.g_y.len() != series.len() {
                return Err(BevmError::input("start trends do not match the series length"));
            }
            s.clone()
        }
        None => initial_start(&problem, &config.trend)?,
    };
    let mut th = Scalars {
        s: start.s,
        sigma_x: start.sigma_x,
        sigma_y: start.sigma_y,
        xi: start.xi,
    };
    let (mut gx, mut gy) = (start.g_x, start.g_y);
    let mut current = problem.objective(&th, &gx, &gy);
    if !current.is_finite() {
        return Err(BevmError::input("starting point is infeasible"));
    }

    let row = |iteration: usize, th: &Scalars, gx: &[f64], gy: &[f64], value: f64| TraceRow {
        iteration,
        s: th.s,
        sigma_x: th.sigma_x,
        sigma_y: th.sigma_y,
        xi: th.xi,
        c: problem.boundary(th, gx, gy).unwrap_or(f64::NAN),
        penalized_loglik: value,
    };
    let mut trace = vec![row(0, &th, &gx, &gy, current)];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=config.max_iter {
        iterations = it;
        let before = current;

        let nx = problem.update_trend(&th, &gx, &gy, true, &config.trend)?;
        if problem.objective(&th, &nx, &gy) >= current {
            gx = nx;
            current = problem.objective(&th, &gx, &gy);
        }
        let ny = problem.update_trend(&th, &gx, &gy, false, &config.trend)?;
        if problem.objective(&th, &gx, &ny) >= current {
            gy = ny;
            current = problem.objective(&th, &gx, &gy);
        }

        let f = |v: &[f64]| -problem.objective(&Scalars::from_slice(v), &gx, &gy);
        let out = bfgs::minimize(f, &th.to_vec(), &config.bfgs);
        if -out.f >= current {
            th = Scalars::from_slice(&out.x);
            current = -out.f;
        }
        trace.push(row(it, &th, &gx, &gy, current));

        if current - before <= config.tol * (1.0 + current.abs()) {
            converged = true;
            break;
        }
    }

    let c_hat = problem
        .boundary(&th, &gx, &gy)
        .ok_or_else(|| BevmError::Numeric {
            message: "fit ended at an infeasible point".into(),
            achieved: f64::NAN,
        })?;
    let loglik_unpenalized = problem.loglik(&th, &gx, &gy);
    let mut result = FitResult {
        s: th.s,
        sigma_x: th.sigma_x,
        sigma_y: th.sigma_y,
        xi: th.xi,
        g_x: gx,
        g_y: gy,
        c_hat,
        c_hat_pickands: f64::NAN,
        trace,
        loglik: current,
        loglik_unpenalized,
        lambda_x,
        lambda_y,
        iterations,
        converged,
        warning: (!converged).then(|| {
            format!(
                "optimizer stopped after {} outer iterations without meeting tolerance {}",
                config.max_iter, config.tol
            )
        }),
    };
    let exp = series.to_exp_scale(&result.margin_x()?, &result.margin_y()?)?;
    result.c_hat_pickands = estimate_c_hat(&exp.exp_pairs()?)?;
    Ok(result)
}

/// Exponential-scale pairs of `series` under the fitted margins.
pub fn fitted_exp_pairs(series: &BivariateSeries, fit: &FitResult) -> Result<Vec<ExpPair>> {
    series
        .to_exp_scale(&fit.margin_x()?, &fit.margin_y()?)?
        .exp_pairs()
}
