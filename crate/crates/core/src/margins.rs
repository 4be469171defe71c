//! Generalized extreme-value laws for minima (GEVM) and the maps between
//! data, standard-exponential and Fréchet scales.
//!
//! With `t = (z - mu) / sigma` the exponential-scale value is
//! `e = [1 - xi t]_+^(-1/xi)` (or `exp(t)` when `xi = 0`) and the survival
//! function is `Pr(Z > z) = exp(-e)`. Under the model `e` is standard
//! exponential.

use serde::{Deserialize, Serialize};

use crate::error::{BevmError, Result};

/// Shapes with magnitude below this are evaluated through the Gumbel limit.
pub const GUMBEL_SHAPE_EPS: f64 = 1e-8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Location, scale and shape of one GEVM margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevmParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GevmParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !mu.is_finite() || !xi.is_finite() {
            return Err(BevmError::param(format!(
                "location and shape must be finite (mu = {mu}, xi = {xi})"
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(BevmError::param(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(mu, self.sigma, self.xi)
    }

    fn is_gumbel(&self) -> bool {
        self.xi.abs() < GUMBEL_SHAPE_EPS
    }

    /// Open support interval `(lo, hi)`; infinite ends are reported as infinities.
    pub fn support(&self) -> (f64, f64) {
        if self.is_gumbel() {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else if self.xi > 0.0 {
            (f64::NEG_INFINITY, self.mu + self.sigma / self.xi)
        } else {
            (self.mu + self.sigma / self.xi, f64::INFINITY)
        }
    }

    pub fn in_support(&self, z: f64) -> bool {
        let (lo, hi) = self.support();
        z > lo && z < hi
    }

    /// `ln e` for `z` inside the support, `None` outside.
    fn log_exp_scale(&self, z: f64) -> Option<f64> {
        let t = (z - self.mu) / self.sigma;
        if self.is_gumbel() {
            return Some(t);
        }
        let arg = -self.xi * t;
        if arg <= -1.0 {
            return None;
        }
        Some(-arg.ln_1p() / self.xi)
    }

    /// Mean of the law, defined for `xi < 1`.
    pub fn mean(&self) -> Option<f64> {
        if self.is_gumbel() {
            return Some(self.mu - EULER_GAMMA * self.sigma);
        }
        if self.xi >= 1.0 {
            return None;
        }
        let g = statrs::function::gamma::gamma(1.0 - self.xi);
        Some(self.mu + self.sigma / self.xi * (1.0 - g))
    }

    pub fn median(&self) -> f64 {
        // e = ln 2 has survival 1/2 and is always a valid argument
        exp_scale_inverse(std::f64::consts::LN_2, self).expect("ln 2 > 0")
    }
}

/// `Pr(Z > z)`; clamps to 0 above and 1 below the support.
pub fn gevm_survival(z: f64, p: &GevmParams) -> f64 {
    match p.log_exp_scale(z) {
        Some(le) => (-le.exp()).exp(),
        None => {
            if p.xi > 0.0 {
                0.0
            } else {
                1.0
            }
        }
    }
}

/// Standard-exponential value of `z`. Fails outside the support.
pub fn exp_scale(z: f64, p: &GevmParams) -> Result<f64> {
    if !z.is_finite() {
        return Err(BevmError::domain(format!("non-finite data value {z}")));
    }
    p.log_exp_scale(z).map(f64::exp).ok_or_else(|| {
        let (lo, hi) = p.support();
        BevmError::domain(format!("{z} lies outside the support ({lo}, {hi})"))
    })
}

/// Inverse of [`exp_scale`]: `z = mu + (sigma/xi)(1 - e^(-xi))`.
pub fn exp_scale_inverse(e: f64, p: &GevmParams) -> Result<f64> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(BevmError::domain(format!(
            "exponential-scale value must be positive and finite, got {e}"
        )));
    }
    let le = e.ln();
    if p.is_gumbel() {
        return Ok(p.mu + p.sigma * le);
    }
    Ok(p.mu - p.sigma * (-p.xi * le).exp_m1() / p.xi)
}

/// Fréchet-scale value `1/e`. The map is an involution.
pub fn frechet_scale(e: f64) -> Result<f64> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(BevmError::domain(format!(
            "Fréchet transform needs a positive finite value, got {e}"
        )));
    }
    Ok(1.0 / e)
}

/// `ln(de/dz)` where `e = exp_scale(z)`; equals `(1 + xi) ln e - ln sigma`.
pub fn log_jacobian(z: f64, p: &GevmParams) -> Result<f64> {
    let e = exp_scale(z, p)?;
    let xi = if p.is_gumbel() { 0.0 } else { p.xi };
    Ok((1.0 + xi) * e.ln() - p.sigma.ln())
}

/// Marginal log density; `-inf` outside the support.
pub fn gevm_log_density(z: f64, p: &GevmParams) -> f64 {
    match (exp_scale(z, p), log_jacobian(z, p)) {
        (Ok(e), Ok(lj)) => lj - e,
        _ => f64::NEG_INFINITY,
    }
}

/// How the location of a margin evolves over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrendSpec {
    /// Use the location stored in the margin.
    Constant,
    /// `mu(t) = intercept + slope * t`.
    Linear { intercept: f64, slope: f64 },
    /// One location per observation time.
    Tabulated(Vec<f64>),
}

/// A margin whose location follows a [`TrendSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendingMargin {
    pub base: GevmParams,
    pub trend: TrendSpec,
}

impl TrendingMargin {
    pub fn stationary(base: GevmParams) -> Self {
        Self {
            base,
            trend: TrendSpec::Constant,
        }
    }

    pub fn linear(intercept: f64, slope: f64, sigma: f64, xi: f64) -> Result<Self> {
        Ok(Self {
            base: GevmParams::new(intercept, sigma, xi)?,
            trend: TrendSpec::Linear { intercept, slope },
        })
    }

    /// Checks the trend against the number of observation times.
    pub fn validate(&self, n_times: usize) -> Result<()> {
        if let TrendSpec::Tabulated(g) = &self.trend {
            if g.len() != n_times {
                return Err(BevmError::param(format!(
                    "tabulated trend has {} entries but there are {n_times} times",
                    g.len()
                )));
            }
        }
        Ok(())
    }

    /// Location at observation `index` taken at time `t`.
    pub fn mu_at(&self, index: usize, t: f64) -> Result<f64> {
        match &self.trend {
            TrendSpec::Constant => Ok(self.base.mu),
            TrendSpec::Linear { intercept, slope } => Ok(intercept + slope * t),
            TrendSpec::Tabulated(g) => g.get(index).copied().ok_or_else(|| {
                BevmError::param(format!("no tabulated location for index {index}"))
            }),
        }
    }

    /// Resolved stationary margin at observation `index` / time `t`.
    pub fn at(&self, index: usize, t: f64) -> Result<GevmParams> {
        self.base.with_mu(self.mu_at(index, t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(mu: f64, sigma: f64, xi: f64) -> GevmParams {
        GevmParams::new(mu, sigma, xi).unwrap()
    }

    #[test]
    fn survival_at_location_is_inverse_e() {
        for &(s, x) in &[(1.0, 0.2), (3.0, -0.4), (0.5, 0.0), (2.0, 1.5)] {
            let q = p(10.0, s, x);
            assert!((gevm_survival(10.0, &q) - (-1.0f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn survival_examples() {
        let q = p(5.0, 2.0, 0.2);
        assert_eq!(gevm_survival(5.0 + 2.0 / 0.2, &q), 0.0);
        assert_eq!(gevm_survival(100.0, &q), 0.0);
        // bracket 1.2 at z = mu - sigma
        let expected = (-(1.2f64.powf(-5.0))).exp();
        assert!((gevm_survival(3.0, &q) - expected).abs() < 1e-15);
        assert!((expected - 0.669063).abs() < 1e-6);
        // below the lower endpoint of a negative-shape law
        let n = p(0.0, 1.0, -0.5);
        assert_eq!(gevm_survival(-2.5, &n), 1.0);
    }

    #[test]
    fn survival_matches_numerical_derivative_of_cdf_integral() {
        // d/dz (1 - S) must equal the density
        let q = p(1.0, 1.5, 0.2);
        for &z in &[-3.0, -1.0, 0.5, 1.0, 3.0, 5.0] {
            let h = 1e-5;
            let fd = (gevm_survival(z - h, &q) - gevm_survival(z + h, &q)) / (2.0 * h);
            let dens = gevm_log_density(z, &q).exp();
            assert!((fd - dens).abs() < 1e-7 * (1.0 + dens), "z={z}: {fd} vs {dens}");
        }
    }

    #[test]
    fn exp_scale_examples() {
        let q = p(150.0, 2.0, 0.2);
        assert!((exp_scale(150.0, &q).unwrap() - 1.0).abs() < 1e-15);
        let e = exp_scale(148.0, &q).unwrap();
        assert!((e - 1.2f64.powf(-5.0)).abs() < 1e-14);
        assert!((e - 0.401878).abs() < 1e-6);
        // oracle: -ln survival
        assert!((e + gevm_survival(148.0, &q).ln()).abs() < 1e-13);
        assert!(matches!(
            exp_scale(160.0, &q),
            Err(BevmError::Domain(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        let q = p(150.0, 2.0, 0.2);
        assert!((exp_scale_inverse(1.0, &q).unwrap() - 150.0).abs() < 1e-12);
        let z = exp_scale_inverse(0.401878, &q).unwrap();
        assert!((z - 148.0).abs() < 1e-4);
        let med = exp_scale_inverse(std::f64::consts::LN_2, &q).unwrap();
        assert!((gevm_survival(med, &q) - 0.5).abs() < 1e-14);
        assert_eq!(med, q.median());
        assert!(exp_scale_inverse(0.0, &q).is_err());
        assert!(exp_scale_inverse(-1.0, &q).is_err());
    }

    #[test]
    fn round_trip_across_shapes() {
        for &xi in &[-0.3, 0.0, 0.2, 0.5] {
            let q = p(3.0, 1.7, xi);
            for k in 1..200 {
                let e = 0.01 * k as f64;
                let z = exp_scale_inverse(e, &q).unwrap();
                let back = exp_scale(z, &q).unwrap();
                assert!((back - e).abs() <= 1e-10 * e, "xi={xi} e={e} back={back}");
                let z2 = exp_scale_inverse(exp_scale(z, &q).unwrap(), &q).unwrap();
                assert!((z2 - z).abs() <= 1e-10 * z.abs().max(1.0));
            }
        }
    }

    #[test]
    fn exp_scale_strictly_increasing_on_grid() {
        for &xi in &[-0.3, 0.0, 0.2, 0.5] {
            let q = p(0.0, 1.0, xi);
            let (lo, hi) = q.support();
            let lo = if lo.is_finite() { lo } else { -8.0 };
            let hi = if hi.is_finite() { hi } else { 4.0 };
            let mut last = f64::NEG_INFINITY;
            for k in 1..=1001 {
                let z = lo + (hi - lo) * k as f64 / 1002.0;
                let e = exp_scale(z, &q).unwrap();
                assert!(e > last, "xi={xi} z={z}");
                last = e;
            }
        }
    }

    #[test]
    fn gumbel_continuity() {
        let near = p(2.0, 1.3, 1e-8);
        let gum = p(2.0, 1.3, 0.0);
        for k in -40..=40 {
            let z = 2.0 + 0.1 * k as f64;
            let a = exp_scale(z, &near).unwrap();
            let b = exp_scale(z, &gum).unwrap();
            assert!((a - b).abs() <= 1e-6 * b, "z={z}");
        }
    }

    #[test]
    fn frechet_involution() {
        assert_eq!(frechet_scale(1.0).unwrap(), 1.0);
        assert_eq!(frechet_scale(2.0).unwrap(), 0.5);
        assert_eq!(frechet_scale(0.25).unwrap(), 4.0);
        let v = 0.37;
        assert!((frechet_scale(frechet_scale(v).unwrap()).unwrap() - v).abs() < 1e-15);
        assert!(frechet_scale(0.0).is_err());
    }

    #[test]
    fn invalid_scale_rejected() {
        assert!(matches!(
            GevmParams::new(0.0, 0.0, 0.1),
            Err(BevmError::Parameter(_))
        ));
        assert!(GevmParams::new(0.0, -1.0, 0.1).is_err());
    }

    #[test]
    fn mean_matches_closed_form() {
        let q = p(100.0, 4.0, 0.2);
        let g = statrs::function::gamma::gamma(0.8);
        assert!((q.mean().unwrap() - (100.0 + 20.0 * (1.0 - g))).abs() < 1e-12);
        let gum = p(0.0, 1.0, 0.0);
        assert!((gum.mean().unwrap() + EULER_GAMMA).abs() < 1e-15);
    }

    #[test]
    fn trend_resolution() {
        let m = TrendingMargin::linear(100.0, -40.0, 4.0, 0.2).unwrap();
        assert!((m.at(3, 0.5).unwrap().mu() - 80.0).abs() < 1e-12);
        let tab = TrendingMargin {
            base: p(0.0, 1.0, 0.1),
            trend: TrendSpec::Tabulated(vec![1.0, 2.0, 3.0]),
        };
        assert!(tab.validate(3).is_ok());
        assert!(tab.validate(4).is_err());
        assert_eq!(tab.at(2, 0.9).unwrap().mu(), 3.0);
    }
}
