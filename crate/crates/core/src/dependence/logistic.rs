//! The logistic-type spectral density shared by every family here.
//!
//! On `(a, b)` with weights `alpha`, `beta` and dependence `s > 1`:
//!
//! ```text
//! h(q) = (s-1)(b-a)(alpha beta)^s [u v]^(s-2) [alpha^s u^s + beta^s v^s]^(1/s - 2)
//! ```
//!
//! with `u = q - a`, `v = b - q`. The density is evaluated from the offsets
//! `(u, v)` directly so integrable endpoint singularities (`s < 2`) keep their
//! precision arbitrarily close to the support ends.

use super::spectral::SpectralDensity;

/// `(x^s + y^s)^(1/s)` for non-negative `x`, `y`, scaled against overflow.
pub fn pnorm(x: f64, y: f64, s: f64) -> f64 {
    let m = x.max(y);
    if m <= 0.0 {
        return 0.0;
    }
    m * ((x / m).powf(s) + (y / m).powf(s)).powf(1.0 / s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticDensity {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
}

impl LogisticDensity {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64, s: f64) -> Self {
        debug_assert!(a < b && s > 1.0 && alpha >= 0.0 && beta >= 0.0);
        Self {
            a,
            b,
            alpha,
            beta,
            s,
        }
    }

    /// Density at a point of `[0, 1]`; zero off `(a, b)`.
    pub fn density(&self, q: f64) -> f64 {
        if q <= self.a || q >= self.b {
            return 0.0;
        }
        SpectralDensity::eval_offsets(self, q - self.a, self.b - q)
    }

    /// Total mass carried by the density, `(alpha + beta) / (b - a)`.
    pub fn total_mass(&self) -> f64 {
        (self.alpha + self.beta) / (self.b - self.a)
    }

    /// Mass of `(a, q]`, from the antiderivative
    /// `(beta + L'(r)) / (b - a)` with `r = (q - a)/(b - a)` and
    /// `L(r) = [(alpha r)^s + (beta (1-r))^s]^(1/s)`.
    pub fn mass_upto(&self, q: f64) -> f64 {
        if q <= self.a {
            return 0.0;
        }
        if q >= self.b {
            return self.total_mass();
        }
        let len = self.b - self.a;
        (self.beta + self.slope_offsets(q - self.a, self.b - q)) / len
    }

    /// `L'(r)` at the point `a + u = b - v`, with both offsets exact so that
    /// either end keeps full relative precision.
    fn slope_offsets(&self, u: f64, v: f64) -> f64 {
        let len = self.b - self.a;
        let (p, m) = (self.alpha * u / len, self.beta * v / len);
        let n = pnorm(p, m, self.s);
        if n == 0.0 {
            return -self.beta;
        }
        let e = self.s - 1.0;
        self.alpha * (p / n).powf(e) - self.beta * (m / n).powf(e)
    }
}

impl SpectralDensity for LogisticDensity {
    fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn eval_offsets(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 || self.alpha == 0.0 || self.beta == 0.0 {
            return 0.0;
        }
        let s = self.s;
        let lu = (self.alpha * u).ln() * s;
        let lv = (self.beta * v).ln() * s;
        let hi = lu.max(lv);
        let log_sum = hi + ((lu - hi).exp() + (lv - hi).exp()).ln();
        let log_h = (s - 1.0).ln()
            + (self.b - self.a).ln()
            + s * (self.alpha * self.beta).ln()
            + (s - 2.0) * (u.ln() + v.ln())
            + (1.0 / s - 2.0) * log_sum;
        log_h.exp()
    }

    fn end_masses(&self, d: f64) -> Option<(f64, f64)> {
        let len = self.b - self.a;
        if !(d > 0.0) || d >= len {
            return None;
        }
        Some((
            (self.beta + self.slope_offsets(d, len - d)) / len,
            (self.alpha - self.slope_offsets(len - d, d)) / len,
        ))
    }

    fn mass_upto(&self, q: f64) -> Option<f64> {
        Some(LogisticDensity::mass_upto(self, q))
    }
}
