//! Structural checks for dependence functions: endpoints, bounds, convexity,
//! spectral moments and `H = A' + 1`.

use serde::Serialize;

use super::DependenceModel;
use crate::quadrature::QuadOptions;

const CURVE_TOL: f64 = 1e-12;
const MOMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst violation found, in the units of the check.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub label: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, worst: f64, tol: f64, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed: worst <= tol,
        worst,
        detail,
    }
}

/// Endpoint, bound and discrete-convexity checks on a tabulated curve.
/// `omegas` must be ascending; the endpoint check only looks at grid points
/// equal to 0 or 1.
pub fn validate_curve(label: &str, omegas: &[f64], values: &[f64]) -> ValidationReport {
    let mut checks = Vec::new();
    let mut worst_end = 0.0f64;
    for (&w, &a) in omegas.iter().zip(values) {
        if w == 0.0 || w == 1.0 {
            worst_end = worst_end.max((a - 1.0).abs());
        }
    }
    checks.push(check(
        "endpoints",
        worst_end,
        CURVE_TOL,
        "A(0) = A(1) = 1".into(),
    ));

    let mut worst_bound = 0.0f64;
    let mut at = f64::NAN;
    for (&w, &a) in omegas.iter().zip(values) {
        let below = w.max(1.0 - w) - a;
        let above = a - 1.0;
        let v = below.max(above).max(0.0);
        if v > worst_bound || !a.is_finite() {
            worst_bound = if a.is_finite() { v } else { f64::INFINITY };
            at = w;
        }
    }
    checks.push(check(
        "bounds",
        worst_bound,
        CURVE_TOL,
        format!("max(w, 1-w) <= A(w) <= 1{}", worst_at(at)),
    ));

    let mut worst_convex = 0.0f64;
    for k in 1..values.len().saturating_sub(1) {
        let (w0, w1, w2) = (omegas[k - 1], omegas[k], omegas[k + 1]);
        // chord value at w1, exact for unequal spacing
        let t = (w1 - w0) / (w2 - w0);
        let chord = (1.0 - t) * values[k - 1] + t * values[k + 1];
        worst_convex = worst_convex.max(values[k] - chord);
    }
    checks.push(check(
        "convexity",
        worst_convex,
        CURVE_TOL,
        "A(w_k) below the chord of its neighbours".into(),
    ));

    ValidationReport {
        label: label.to_string(),
        checks,
    }
}

/// Full validation of a parametric family on an `n`-point grid.
pub fn validate_dependence(model: &DependenceModel, n: usize) -> ValidationReport {
    let n = n.max(3);
    let omegas: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = omegas.iter().map(|&w| model.a(w)).collect();
    let mut report = validate_curve(&model.label(), &omegas, &values);

    let measure = model.spectral_measure();
    let opts = QuadOptions::default();
    match measure.moments(&opts) {
        Ok((m1, m2)) => {
            let worst = (m1.value - 1.0).abs().max((m2.value - 1.0).abs());
            report.checks.push(check(
                "moments",
                worst,
                MOMENT_TOL,
                format!("int q dH = {}, int (1-q) dH = {}", m1.value, m2.value),
            ));
        }
        Err(e) => report.checks.push(Check {
            name: "moments".into(),
            passed: false,
            worst: f64::INFINITY,
            detail: e.to_string(),
        }),
    }

    let mut worst = 0.0f64;
    let mut at = f64::NAN;
    for &w in &omegas {
        match model.eval(w) {
            Ok(e) => {
                let d = (e.h_measure - (e.a_prime + 1.0)).abs();
                if d > worst || !d.is_finite() {
                    worst = if d.is_finite() { d } else { f64::INFINITY };
                    at = w;
                }
            }
            Err(_) => {
                worst = f64::INFINITY;
                at = w;
            }
        }
    }
    report.checks.push(check(
        "measure_derivative",
        worst,
        MOMENT_TOL,
        format!("H(w) = A'(w) + 1{}", worst_at(at)),
    ));
    report
}

fn worst_at(at: f64) -> String {
    if at.is_nan() {
        String::new()
    } else {
        format!("; worst at w = {at}")
    }
}
