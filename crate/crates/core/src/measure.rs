//! Exponential measure `V`, joint survival and density, and the ordering
//! boundary `c` implied by a pair of margins.
//!
//! On exponential margins the joint survival is `exp(-V(x, y))` with
//! `V(x, y) = (x + y) A(w)`, `w = y / (x + y)`.

use serde::{Deserialize, Serialize};

use crate::dependence::{pnorm, DependenceModel, RestrictedLogisticParams};
use crate::error::{BevmError, Result};
use crate::margins::{exp_scale, exp_scale_inverse, log_jacobian, GevmParams, TrendingMargin};
use crate::quadrature::QuadOptions;

/// A point on standard-exponential margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPair {
    pub x_e: f64,
    pub y_e: f64,
}

impl ExpPair {
    pub fn new(x_e: f64, y_e: f64) -> Result<Self> {
        if !(x_e > 0.0 && y_e > 0.0) || !x_e.is_finite() || !y_e.is_finite() {
            return Err(BevmError::domain(format!(
                "exponential-scale coordinates must be positive and finite, got ({x_e}, {y_e})"
            )));
        }
        Ok(Self { x_e, y_e })
    }

    /// The y-fraction `y / (x + y)`.
    pub fn omega(&self) -> f64 {
        self.y_e / (self.x_e + self.y_e)
    }

    pub fn to_frechet(&self) -> FrechetPair {
        FrechetPair {
            x_f: 1.0 / self.x_e,
            y_f: 1.0 / self.y_e,
        }
    }
}

/// A point on unit Fréchet margins, the reciprocal of an [`ExpPair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetPair {
    pub x_f: f64,
    pub y_f: f64,
}

impl FrechetPair {
    pub fn new(x_f: f64, y_f: f64) -> Result<Self> {
        if !(x_f > 0.0 && y_f > 0.0) || !x_f.is_finite() || !y_f.is_finite() {
            return Err(BevmError::domain(format!(
                "Fréchet coordinates must be positive and finite, got ({x_f}, {y_f})"
            )));
        }
        Ok(Self { x_f, y_f })
    }

    pub fn to_exp(&self) -> ExpPair {
        ExpPair {
            x_e: 1.0 / self.x_f,
            y_e: 1.0 / self.y_f,
        }
    }
}

fn check_pair(p: &ExpPair) -> Result<()> {
    ExpPair::new(p.x_e, p.y_e).map(|_| ())
}

/// Closed-form `V` of the restricted logistic family.
///
/// `V = x` when `y / (x + y) <= c`, otherwise
/// `V = ({[(1-c) y - c x]^s + (1-2c)^s x^s}^(1/s) + c x) / (1 - c)`.
pub fn v_closed(p: &ExpPair, c: f64, s: f64) -> Result<f64> {
    let params = RestrictedLogisticParams::new(c, s)?;
    check_pair(p)?;
    Ok(v_restricted(p.x_e, p.y_e, &params))
}

fn v_restricted(x: f64, y: f64, p: &RestrictedLogisticParams) -> f64 {
    let c = p.c;
    let u = (1.0 - c) * y - c * x;
    if u <= 0.0 {
        return x;
    }
    let k = 1.0 - 2.0 * c;
    (pnorm(u, k * x, p.s) + c * x) / (1.0 - c)
}

/// `V = ∫ max(q x, (1 - q) y) dH(q)` by quadrature against the spectral
/// measure of `model`.
pub fn v_numeric(p: &ExpPair, model: &DependenceModel) -> Result<f64> {
    check_pair(p)?;
    let (x, y) = (p.x_e, p.y_e);
    let measure = model.spectral_measure();
    let kink = y / (x + y);
    let opts = QuadOptions::default();
    let q = measure.integrate(|q| (q * x).max((1.0 - q) * y), &[kink], &opts)?;
    Ok(q.value)
}

/// `V = (x + y) A(y / (x + y))` for an arbitrary dependence function.
pub fn v_from_a<F: Fn(f64) -> f64>(p: &ExpPair, a: F) -> f64 {
    let total = p.x_e + p.y_e;
    total * a(p.y_e / total)
}

/// `V` for a parametric family, using the closed form where one exists.
pub fn v_model(p: &ExpPair, model: &DependenceModel) -> f64 {
    match model {
        DependenceModel::Restricted(r) => v_restricted(p.x_e, p.y_e, r),
        m => v_from_a(p, |w| m.a(w)),
    }
}

/// First and mixed partial derivatives of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub v: f64,
    pub vx: f64,
    pub vy: f64,
    pub vxy: f64,
}

/// Partials of the restricted-logistic `V`. Exactly on the branch boundary
/// `y / (x + y) = c` the derivatives jump, so a boundary error is returned.
pub fn v_partials(p: &ExpPair, c: f64, s: f64) -> Result<Partials> {
    let params = RestrictedLogisticParams::new(c, s)?;
    check_pair(p)?;
    let u = (1.0 - c) * p.y_e - c * p.x_e;
    if u == 0.0 && c > 0.0 {
        return Err(BevmError::Boundary(format!(
            "y/(x+y) = c = {c} at ({}, {})",
            p.x_e, p.y_e
        )));
    }
    Ok(restricted_partials(p.x_e, p.y_e, &params))
}

fn restricted_partials(x: f64, y: f64, p: &RestrictedLogisticParams) -> Partials {
    let (c, s) = (p.c, p.s);
    let u = (1.0 - c) * y - c * x;
    if u <= 0.0 {
        return Partials {
            v: x,
            vx: 1.0,
            vy: 0.0,
            vxy: 0.0,
        };
    }
    let k = 1.0 - 2.0 * c;
    let kx = k * x;
    let n = pnorm(u, kx, s);
    let ru = u / n;
    let rk = kx / n;
    let e = s - 1.0;
    let vy = ru.powf(e);
    let vx = (-c * ru.powf(e) + k * rk.powf(e) + c) / (1.0 - c);
    // -(s-1)(1-c) k^s N^(1-2s) u^(s-2) x^(s-1) y, regrouped in ratios
    let vxy = if k == 0.0 {
        0.0
    } else {
        -(s - 1.0) * (1.0 - c) * k * ru.powf(s - 2.0) * rk.powf(e) * y / (n * n)
    };
    Partials {
        v: (n + c * x) / (1.0 - c),
        vx,
        vy,
        vxy,
    }
}

/// Partials of `V = (x + y) A(w)` for any family:
/// `V_x = A - w A'`, `V_y = A + (1 - w) A'`, `V_xy = -h(w) w (1 - w) / (x + y)`.
pub fn model_partials(p: &ExpPair, model: &DependenceModel) -> Result<Partials> {
    check_pair(p)?;
    if let DependenceModel::Restricted(r) = model {
        return Ok(restricted_partials(p.x_e, p.y_e, r));
    }
    let total = p.x_e + p.y_e;
    let w = p.y_e / total;
    let (a, da) = (model.a(w), model.a_prime(w));
    let h = model.density().map_or(0.0, |d| d.density(w));
    Ok(Partials {
        v: total * a,
        vx: a - w * da,
        vy: a + (1.0 - w) * da,
        vxy: -h * w * (1.0 - w) / total,
    })
}

/// Restricted-logistic `V` on Fréchet margins: `V(1/x_f, 1/y_f)`.
pub fn v_frechet(p: &FrechetPair, c: f64, s: f64) -> Result<f64> {
    FrechetPair::new(p.x_f, p.y_f)?;
    v_closed(&p.to_exp(), c, s)
}

/// Closed-form `∂²V/∂x_f∂y_f = -h(w) / (x_f + y_f)^3` with
/// `w = x_f / (x_f + y_f)`.
pub fn frechet_mixed_partial(p: &FrechetPair, model: &DependenceModel) -> Result<f64> {
    FrechetPair::new(p.x_f, p.y_f)?;
    let total = p.x_f + p.y_f;
    let w = p.x_f / total;
    let h = model.density().map_or(0.0, |d| d.density(w));
    Ok(-h / total.powi(3))
}

/// `Pr(X > x, Y > y)` with GEVM margins.
pub fn joint_survival_gevm(
    x: f64,
    y: f64,
    mx: &GevmParams,
    my: &GevmParams,
    model: &DependenceModel,
) -> Result<f64> {
    let p = ExpPair::new(exp_scale(x, mx)?, exp_scale(y, my)?)?;
    Ok((-v_model(&p, model)).exp())
}

/// Log density of the absolutely continuous part on exponential margins,
/// `ln G + ln(V_x V_y - V_xy)`. Points where the density vanishes, such as
/// the region `y / (x + y) <= c` of the restricted family, give `-inf`.
pub fn joint_log_density_exp(p: &ExpPair, model: &DependenceModel) -> Result<f64> {
    let d = model_partials(p, model)?;
    let core = d.vx * d.vy - d.vxy;
    if !(core > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(core.ln() - d.v)
}

/// Joint log density on the data scale: the exponential-scale log density
/// plus both log-Jacobians.
pub fn joint_log_density_gevm(
    x: f64,
    y: f64,
    mx: &GevmParams,
    my: &GevmParams,
    model: &DependenceModel,
) -> Result<f64> {
    let p = ExpPair::new(exp_scale(x, mx)?, exp_scale(y, my)?)?;
    let core = joint_log_density_exp(&p, model)?;
    if core == f64::NEG_INFINITY {
        return Ok(core);
    }
    Ok(core + log_jacobian(x, mx)? + log_jacobian(y, my)?)
}

/// Result of a boundary search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEstimate {
    /// `1 / (1 + d)`.
    pub c: f64,
    /// Minimum of `D(z, z) = e_x(z) / e_y(z)`.
    pub d: f64,
    /// Location of the minimum; `None` for the analytic tail limit.
    pub argmin: Option<f64>,
    /// `d <= 1`: the margins cannot support an ordered model.
    pub degenerate: bool,
}

impl BoundaryEstimate {
    fn from_log_d(log_d: f64, argmin: Option<f64>) -> Self {
        let d = log_d.exp();
        // 1/(1+d) written to stay accurate for large and tiny d
        let c = if log_d > 0.0 {
            let r = (-log_d).exp();
            r / (1.0 + r)
        } else {
            1.0 / (1.0 + d)
        };
        Self {
            c,
            d,
            argmin,
            degenerate: !(c < 0.5),
        }
    }
}

fn log_d_at(z: f64, mx: &GevmParams, my: &GevmParams) -> Option<f64> {
    match (exp_scale(z, mx), exp_scale(z, my)) {
        (Ok(ex), Ok(ey)) => Some(ex.ln() - ey.ln()),
        _ => None,
    }
}

const GRID_POINTS: usize = 512;
const GOLDEN_ITERS: usize = 200;

/// Boundary `c = 1 / (1 + min D(z, z))` over `domain` (defaults to a central
/// range of the x-margin), by a log-spaced grid reaching ten domain widths
/// below the upper end, golden-section refinement and, when both shapes are
/// equal and positive, the tail limit `(sigma_x / sigma_y)^(1/xi)`.
pub fn c_from_margins(
    mx: &GevmParams,
    my: &GevmParams,
    domain: Option<(f64, f64)>,
) -> Result<BoundaryEstimate> {
    let (sx_lo, sx_hi) = mx.support();
    let (sy_lo, sy_hi) = my.support();
    let (sup_lo, sup_hi) = (sx_lo.max(sy_lo), sx_hi.min(sy_hi));
    let (mut a, mut b) = match domain {
        Some(d) => d,
        None => (
            exp_scale_inverse(1e-3, mx)?,
            exp_scale_inverse(10.0, mx)?,
        ),
    };
    a = a.max(sup_lo);
    b = b.min(sup_hi);
    if !(a < b) {
        return Err(BevmError::domain(format!(
            "empty search domain: ({a}, {b}) after intersecting with the supports"
        )));
    }
    let span = b - a;

    let mut best: Option<(f64, f64)> = None;
    let mut grid = Vec::with_capacity(GRID_POINTS);
    for k in 0..GRID_POINTS {
        let t = k as f64 / (GRID_POINTS - 1) as f64;
        let offset = span * 10f64.powf(-9.0 + 10.0 * t);
        let z = b - offset;
        if z <= sup_lo || z >= sup_hi {
            continue;
        }
        if let Some(ld) = log_d_at(z, mx, my) {
            grid.push((z, ld));
        }
    }
    // grid is ordered by decreasing z
    if let Some((idx, _)) = grid
        .iter()
        .enumerate()
        .min_by(|p, q| p.1 .1.total_cmp(&q.1 .1))
    {
        let lo = grid[(idx + 1).min(grid.len() - 1)].0;
        let hi = grid[idx.saturating_sub(1)].0;
        let (z, ld) = golden_min(|z| log_d_at(z, mx, my).unwrap_or(f64::INFINITY), lo, hi);
        let (gz, gld) = grid[idx];
        best = Some(if ld < gld { (z, ld) } else { (gz, gld) });
    }

    let mut estimate = best.map(|(z, ld)| BoundaryEstimate::from_log_d(ld, Some(z)));
    let xi = mx.xi();
    if (xi - my.xi()).abs() < 1e-12 && xi > crate::margins::GUMBEL_SHAPE_EPS {
        let tail = (mx.sigma() / my.sigma()).ln() / xi;
        if estimate.is_none_or(|e| tail < e.d.ln()) {
            estimate = Some(BoundaryEstimate::from_log_d(tail, None));
        }
    }
    estimate.ok_or_else(|| BevmError::domain("no point of the search domain lies in both supports"))
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if (hi - lo).abs() <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Boundary for trending margins: the largest per-time boundary.
pub fn c_from_trending_margins(
    mx: &TrendingMargin,
    my: &TrendingMargin,
    times: &[f64],
    domain: Option<(f64, f64)>,
) -> Result<BoundaryEstimate> {
    if times.is_empty() {
        return Err(BevmError::input("no observation times"));
    }
    let mut worst: Option<BoundaryEstimate> = None;
    for (i, &t) in times.iter().enumerate() {
        let e = c_from_margins(&mx.at(i, t)?, &my.at(i, t)?, domain)?;
        if worst.is_none_or(|w| e.c > w.c) {
            worst = Some(e);
        }
    }
    Ok(worst.expect("times non-empty"))
}

/// Boundary over the full common support for two margins sharing a shape,
/// in closed form. With `r = b_y / b_x = sigma_x/sigma_y + K / b_x`,
/// `K = 1 + xi (mu_y - mu_x) / sigma_y - sigma_x / sigma_y`, the ratio is
/// monotone so its extreme sits at an end of the support.
pub fn boundary_common_shape(mx: &GevmParams, my: &GevmParams) -> Result<BoundaryEstimate> {
    let xi = mx.xi();
    if (xi - my.xi()).abs() > 1e-12 {
        return Err(BevmError::param(format!(
            "shapes differ ({} vs {})",
            mx.xi(),
            my.xi()
        )));
    }
    let rho = mx.sigma() / my.sigma();
    let delta = my.mu() - mx.mu();
    if xi.abs() < crate::margins::GUMBEL_SHAPE_EPS {
        // ln D is linear in z with slope 1/sigma_x - 1/sigma_y
        if mx.sigma() == my.sigma() {
            return Ok(BoundaryEstimate::from_log_d(delta / my.sigma(), None));
        }
        return Ok(BoundaryEstimate::from_log_d(f64::NEG_INFINITY, None));
    }
    let k = 1.0 + xi * delta / my.sigma() - rho;
    let feasible = if xi > 0.0 { k >= 0.0 } else { k <= 0.0 };
    if feasible {
        Ok(BoundaryEstimate::from_log_d(rho.ln() / xi, None))
    } else {
        Ok(BoundaryEstimate::from_log_d(f64::NEG_INFINITY, None))
    }
}
