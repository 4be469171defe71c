//! Parametric Pickands dependence families.
//!
//! The dependence function `A(w)` is indexed by `w = y / (x + y)` on the
//! exponential scale, so `V(x, y) = (x + y) A(w)` and ordering `X < Y` forces
//! `A(w) = 1 - w` below the boundary `c`. Every family exposes `A`, `A'`, the
//! spectral density `h = A''`, the measure `H = A' + 1` and its atoms.

mod logistic;
mod spectral;
mod validate;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{BevmError, Result};

pub use logistic::{pnorm, LogisticDensity};
pub use spectral::{a_numeric_oracle, Atom, SpectralDensity, SpectralMeasure};
pub use validate::{validate_curve, validate_dependence, Check, ValidationReport};

/// Asymmetric logistic: atoms `1 - theta1` at 0 and `1 - theta2` at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymLogisticParams {
    pub theta1: f64,
    pub theta2: f64,
    pub s: f64,
}

impl AsymLogisticParams {
    pub fn new(theta1: f64, theta2: f64, s: f64) -> Result<Self> {
        check_unit("theta1", theta1)?;
        check_unit("theta2", theta2)?;
        check_s(s)?;
        Ok(Self { theta1, theta2, s })
    }

    fn independent(&self) -> bool {
        self.s == 1.0 || self.theta1 == 0.0 || self.theta2 == 0.0
    }
}

/// Restricted logistic: no spectral mass on `[0, c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedLogisticParams {
    pub c: f64,
    pub s: f64,
}

impl RestrictedLogisticParams {
    pub fn new(c: f64, s: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&c) {
            return Err(BevmError::param(format!("c must be < 0.5 and >= 0, got {c}")));
        }
        check_s(s)?;
        Ok(Self { c, s })
    }

    /// The same model written as an asymmetric logistic on the rescaled axis.
    pub fn as_asym(&self) -> AsymLogisticParams {
        AsymLogisticParams {
            theta1: 1.0,
            theta2: 1.0 - 2.0 * self.c,
            s: self.s,
        }
    }
}

/// Mirror image of the restricted family: no spectral mass on `(c, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperRestrictedParams {
    pub c: f64,
    pub s: f64,
}

impl UpperRestrictedParams {
    pub fn new(c: f64, s: f64) -> Result<Self> {
        if !(c > 0.5 && c <= 1.0) {
            return Err(BevmError::param(format!("c must be in (0.5, 1], got {c}")));
        }
        check_s(s)?;
        Ok(Self { c, s })
    }
}

/// Spectral mass confined to `[c1, c2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRestrictedParams {
    pub c1: f64,
    pub c2: f64,
    pub s: f64,
}

impl IntervalRestrictedParams {
    pub fn new(c1: f64, c2: f64, s: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&c1) {
            return Err(BevmError::param(format!("c1 must be in [0, 0.5), got {c1}")));
        }
        if !(c2 > 0.5 && c2 <= 1.0) {
            return Err(BevmError::param(format!("c2 must be in (0.5, 1], got {c2}")));
        }
        check_s(s)?;
        Ok(Self { c1, c2, s })
    }
}

/// General logistic density on `(a, b)` with `alpha = 2b - 1`, `beta = 1 - 2a`
/// and end masses `gamma1`, `gamma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NadarajahGeneralParams {
    pub a: f64,
    pub b: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub s: f64,
}

impl NadarajahGeneralParams {
    pub fn new(a: f64, b: f64, gamma1: f64, gamma2: f64, s: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&a) {
            return Err(BevmError::param(format!("a must be in [0, 0.5), got {a}")));
        }
        if !(0.5..=1.0).contains(&b) {
            return Err(BevmError::param(format!("b must be in [0.5, 1], got {b}")));
        }
        if !(s > 1.0) || !s.is_finite() {
            return Err(BevmError::param(format!("s must be > 1, got {s}")));
        }
        if !(gamma1 >= 0.0 && gamma2 >= 0.0 && gamma1 + gamma2 < 2.0) {
            return Err(BevmError::param(
                "end masses must be non-negative with gamma1 + gamma2 < 2",
            ));
        }
        let width = b - a;
        if gamma2 > (1.0 - 2.0 * a) / width || gamma1 > (2.0 * b - 1.0) / width {
            return Err(BevmError::param(
                "end masses exceed (1-2a)/(b-a) or (2b-1)/(b-a)",
            ));
        }
        Ok(Self {
            a,
            b,
            gamma1,
            gamma2,
            s,
        })
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.b - 1.0
    }

    pub fn beta(&self) -> f64 {
        1.0 - 2.0 * self.a
    }

    pub fn density(&self) -> LogisticDensity {
        LogisticDensity::new(self.a, self.b, self.alpha(), self.beta(), self.s)
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(BevmError::param(format!("{name} must be in [0, 1], got {v}")))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(BevmError::param(format!("s must be >= 1, got {s}")))
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if (0.0..=1.0).contains(&omega) {
        Ok(())
    } else {
        Err(BevmError::domain(format!("w must lie in [0, 1], got {omega}")))
    }
}

/// Everything a family reports at one `w`.
///
/// `a_prime` is the right derivative on `[0, 1)` and the left derivative at 1;
/// `h_measure` is `H([0, w])` with the atom at 1 left out at `w = 1`, so
/// `h_measure = a_prime + 1` holds everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceEval {
    pub a_val: f64,
    pub a_prime: f64,
    pub h_val: f64,
    pub h_measure: f64,
    pub atom0: f64,
    pub atom1: f64,
}

/// A parametric dependence family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DependenceModel {
    Asym(AsymLogisticParams),
    Restricted(RestrictedLogisticParams),
    Upper(UpperRestrictedParams),
    Interval(IntervalRestrictedParams),
}

impl DependenceModel {
    pub fn s(&self) -> f64 {
        match self {
            DependenceModel::Asym(p) => p.s,
            DependenceModel::Restricted(p) => p.s,
            DependenceModel::Upper(p) => p.s,
            DependenceModel::Interval(p) => p.s,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DependenceModel::Asym(p) => {
                format!("asym(theta1={},theta2={},s={})", p.theta1, p.theta2, p.s)
            }
            DependenceModel::Restricted(p) => format!("restricted(c={},s={})", p.c, p.s),
            DependenceModel::Upper(p) => format!("upper(c={},s={})", p.c, p.s),
            DependenceModel::Interval(p) => {
                format!("interval(c1={},c2={},s={})", p.c1, p.c2, p.s)
            }
        }
    }

    /// Dependence function alone.
    pub fn a(&self, omega: f64) -> f64 {
        match self {
            DependenceModel::Asym(p) => asym_a(omega, p),
            DependenceModel::Restricted(p) => restricted_a(omega, p),
            DependenceModel::Upper(p) => upper_a(omega, p),
            DependenceModel::Interval(p) => interval_a(omega, p),
        }
    }

    /// `A'` using the conventions of [`DependenceEval`].
    pub fn a_prime(&self, omega: f64) -> f64 {
        match self {
            DependenceModel::Asym(p) => asym_a_prime(omega, p),
            DependenceModel::Restricted(p) => restricted_a_prime(omega, p),
            DependenceModel::Upper(p) => upper_a_prime(omega, p),
            DependenceModel::Interval(p) => interval_a_prime(omega, p),
        }
    }

    pub fn density(&self) -> Option<LogisticDensity> {
        if self.s() == 1.0 {
            return None;
        }
        match self {
            DependenceModel::Asym(p) => {
                if p.independent() {
                    None
                } else {
                    Some(LogisticDensity::new(0.0, 1.0, p.theta1, p.theta2, p.s))
                }
            }
            DependenceModel::Restricted(p) => Some(LogisticDensity::new(
                p.c,
                1.0,
                1.0,
                1.0 - 2.0 * p.c,
                p.s,
            )),
            DependenceModel::Upper(p) => Some(LogisticDensity::new(
                0.0,
                p.c,
                2.0 * p.c - 1.0,
                1.0,
                p.s,
            )),
            DependenceModel::Interval(p) => Some(LogisticDensity::new(
                p.c1,
                p.c2,
                2.0 * p.c2 - 1.0,
                1.0 - 2.0 * p.c1,
                p.s,
            )),
        }
    }

    /// Point masses of the spectral measure. At `s = 1` the mass collapses
    /// onto the support ends of the density, which may be interior points.
    pub fn atoms(&self) -> Vec<Atom> {
        let at = |loc: f64, mass: f64| Atom { loc, mass };
        let weakest = self.s() == 1.0;
        let mut atoms = match self {
            DependenceModel::Asym(p) => {
                if p.independent() {
                    vec![at(0.0, 1.0), at(1.0, 1.0)]
                } else {
                    vec![at(0.0, 1.0 - p.theta1), at(1.0, 1.0 - p.theta2)]
                }
            }
            DependenceModel::Restricted(p) if weakest => {
                let k = 1.0 - 2.0 * p.c;
                vec![at(p.c, 1.0 / (1.0 - p.c)), at(1.0, k / (1.0 - p.c))]
            }
            DependenceModel::Upper(p) if weakest => {
                vec![at(0.0, (2.0 * p.c - 1.0) / p.c), at(p.c, 1.0 / p.c)]
            }
            DependenceModel::Interval(p) if weakest => {
                let width = p.c2 - p.c1;
                vec![
                    at(p.c1, (2.0 * p.c2 - 1.0) / width),
                    at(p.c2, (1.0 - 2.0 * p.c1) / width),
                ]
            }
            _ => vec![],
        };
        atoms.retain(|a| a.mass > 0.0);
        atoms
    }

    pub fn spectral_measure(&self) -> SpectralMeasure {
        SpectralMeasure {
            density: self
                .density()
                .map(|d| Arc::new(d) as Arc<dyn SpectralDensity>),
            atoms: self.atoms(),
        }
    }

    /// Range of `w` carrying spectral mass; outside it `A` is linear.
    pub fn active_range(&self) -> (f64, f64) {
        match self {
            DependenceModel::Asym(_) => (0.0, 1.0),
            DependenceModel::Restricted(p) => (p.c, 1.0),
            DependenceModel::Upper(p) => (0.0, p.c),
            DependenceModel::Interval(p) => (p.c1, p.c2),
        }
    }

    /// Points where `A` may fail to be smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.active_range();
        [lo, hi].into_iter().filter(|v| *v > 0.0 && *v < 1.0).collect()
    }

    pub fn eval(&self, omega: f64) -> Result<DependenceEval> {
        check_omega(omega)?;
        let measure = self.spectral_measure();
        let h_measure = measure
            .mass_upto(omega)
            .expect("logistic densities have closed-form antiderivatives");
        Ok(DependenceEval {
            a_val: self.a(omega),
            a_prime: self.a_prime(omega),
            h_val: self.density().map_or(0.0, |d| d.density(omega)),
            h_measure,
            atom0: measure.atom_at(0.0),
            atom1: measure.atom_at(1.0),
        })
    }
}

fn asym_a(w: f64, p: &AsymLogisticParams) -> f64 {
    if p.independent() {
        return 1.0;
    }
    (1.0 - p.theta1) * w
        + (1.0 - p.theta2) * (1.0 - w)
        + pnorm(p.theta1 * w, p.theta2 * (1.0 - w), p.s)
}

fn asym_a_prime(w: f64, p: &AsymLogisticParams) -> f64 {
    if p.independent() {
        return 0.0;
    }
    let (x, y) = (p.theta1 * w, p.theta2 * (1.0 - w));
    let n = pnorm(x, y, p.s);
    let e = p.s - 1.0;
    p.theta2 - p.theta1 + p.theta1 * (x / n).powf(e) - p.theta2 * (y / n).powf(e)
}

fn restricted_a(w: f64, p: &RestrictedLogisticParams) -> f64 {
    if w <= p.c {
        return 1.0 - w;
    }
    let k = 1.0 - 2.0 * p.c;
    let l = pnorm(w - p.c, k * (1.0 - w), p.s);
    (p.c * (1.0 - w) + l) / (1.0 - p.c)
}

fn restricted_a_prime(w: f64, p: &RestrictedLogisticParams) -> f64 {
    if w < p.c {
        return -1.0;
    }
    let k = 1.0 - 2.0 * p.c;
    let (x, y) = (w - p.c, k * (1.0 - w));
    let l = pnorm(x, y, p.s);
    let e = p.s - 1.0;
    let dl = (x / l).powf(e) - k * (y / l).powf(e);
    (dl - p.c) / (1.0 - p.c)
}

fn upper_a(w: f64, p: &UpperRestrictedParams) -> f64 {
    if w > p.c {
        return w;
    }
    let alpha = 2.0 * p.c - 1.0;
    let m = pnorm(alpha * w, p.c - w, p.s);
    ((1.0 - p.c) * w + m) / p.c
}

fn upper_a_prime(w: f64, p: &UpperRestrictedParams) -> f64 {
    if w >= p.c && (w < 1.0 || p.c < 1.0) {
        return 1.0;
    }
    let alpha = 2.0 * p.c - 1.0;
    let (x, y) = (alpha * w, p.c - w);
    let m = pnorm(x, y, p.s);
    let e = p.s - 1.0;
    let dm = alpha * (x / m).powf(e) - (y / m).powf(e);
    ((1.0 - p.c) + dm) / p.c
}

fn interval_a(w: f64, p: &IntervalRestrictedParams) -> f64 {
    if w < p.c1 {
        return 1.0 - w;
    }
    if w > p.c2 {
        return w;
    }
    let width = p.c2 - p.c1;
    let (alpha, beta) = (2.0 * p.c2 - 1.0, 1.0 - 2.0 * p.c1);
    let linear = ((1.0 - p.c2) * (w - p.c1) + p.c1 * (p.c2 - w)) / width;
    linear + pnorm(alpha * (w - p.c1), beta * (p.c2 - w), p.s) / width
}

fn interval_a_prime(w: f64, p: &IntervalRestrictedParams) -> f64 {
    if w < p.c1 {
        return -1.0;
    }
    if w >= p.c2 && (w < 1.0 || p.c2 < 1.0) {
        return 1.0;
    }
    let width = p.c2 - p.c1;
    let (alpha, beta) = (2.0 * p.c2 - 1.0, 1.0 - 2.0 * p.c1);
    let (x, y) = (alpha * (w - p.c1), beta * (p.c2 - w));
    let n = pnorm(x, y, p.s);
    let e = p.s - 1.0;
    let dw = alpha * (x / n).powf(e) - beta * (y / n).powf(e);
    (1.0 - p.c2 - p.c1 + dw) / width
}

pub fn eval_asym(omega: f64, p: &AsymLogisticParams) -> Result<DependenceEval> {
    DependenceModel::Asym(AsymLogisticParams::new(p.theta1, p.theta2, p.s)?).eval(omega)
}

pub fn eval_restricted(omega: f64, p: &RestrictedLogisticParams) -> Result<DependenceEval> {
    DependenceModel::Restricted(RestrictedLogisticParams::new(p.c, p.s)?).eval(omega)
}

pub fn eval_upper(omega: f64, p: &UpperRestrictedParams) -> Result<DependenceEval> {
    DependenceModel::Upper(UpperRestrictedParams::new(p.c, p.s)?).eval(omega)
}

pub fn eval_interval(omega: f64, p: &IntervalRestrictedParams) -> Result<DependenceEval> {
    DependenceModel::Interval(IntervalRestrictedParams::new(p.c1, p.c2, p.s)?).eval(omega)
}

/// General logistic density; zero off `(a, b)`.
pub fn nadarajah_density(omega: f64, p: &NadarajahGeneralParams) -> Result<f64> {
    check_omega(omega)?;
    Ok(p.density().density(omega))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |k| k as f64 / n as f64)
    }

    fn restricted(c: f64, s: f64) -> DependenceModel {
        DependenceModel::Restricted(RestrictedLogisticParams::new(c, s).unwrap())
    }

    #[test]
    fn asym_examples() {
        let p = AsymLogisticParams::new(0.4, 0.7, 3.0).unwrap();
        assert!((eval_asym(0.0, &p).unwrap().a_val - 1.0).abs() < 1e-15);
        assert!((eval_asym(1.0, &p).unwrap().a_val - 1.0).abs() < 1e-15);
        let sym = AsymLogisticParams::new(1.0, 1.0, 2.0).unwrap();
        let e = eval_asym(0.5, &sym).unwrap();
        assert!((e.h_val - 2f64.powf(1.5)).abs() < 1e-12);
        let ind = AsymLogisticParams::new(1.0, 1.0, 1.0).unwrap();
        for w in grid(20) {
            assert_eq!(eval_asym(w, &ind).unwrap().a_val, 1.0);
        }
    }

    #[test]
    fn asym_h_matches_second_difference() {
        let p = AsymLogisticParams::new(1.0, 1.0, 2.0).unwrap();
        let m = DependenceModel::Asym(p);
        let h = 1e-4;
        let fd = (m.a(0.5 + h) - 2.0 * m.a(0.5) + m.a(0.5 - h)) / (h * h);
        assert!((fd - 2f64.powf(1.5)).abs() < 1e-4 * 2.83);
    }

    #[test]
    fn asym_measure_limits() {
        let p = AsymLogisticParams::new(0.4, 0.7, 3.0).unwrap();
        let e0 = eval_asym(0.0, &p).unwrap();
        assert!((e0.h_measure - 0.6).abs() < 1e-12);
        assert!((e0.a_prime + 1.0 - 0.6).abs() < 1e-12);
        let e1 = eval_asym(1.0, &p).unwrap();
        assert!((e1.h_measure - 1.7).abs() < 1e-12);
        assert!((e1.atom0 - 0.6).abs() < 1e-15 && (e1.atom1 - 0.3).abs() < 1e-15);
        for w in grid(50) {
            let e = eval_asym(w, &p).unwrap();
            assert!(e.a_val >= w.max(1.0 - w) - 1e-15 && e.a_val <= 1.0 + 1e-15);
            assert!(e.h_val >= 0.0);
        }
    }

    #[test]
    fn restricted_examples() {
        let p = RestrictedLogisticParams::new(0.25, 1.0).unwrap();
        assert!((eval_restricted(0.5, &p).unwrap().a_val - 5.0 / 6.0).abs() < 1e-15);
        for &s in &[1.0, 1.5, 2.5, 7.0] {
            let q = RestrictedLogisticParams::new(0.25, s).unwrap();
            assert_eq!(eval_restricted(0.1, &q).unwrap().a_val, 0.9);
        }
        let q = RestrictedLogisticParams::new(0.0, 2.0).unwrap();
        assert!((eval_restricted(0.5, &q).unwrap().a_val - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn restricted_rejects_large_c() {
        let err = RestrictedLogisticParams::new(0.7, 2.0).unwrap_err();
        assert!(err.to_string().contains("c must be < 0.5"));
        assert!(RestrictedLogisticParams::new(0.5, 2.0).is_err());
        assert!(RestrictedLogisticParams::new(0.2, 0.9).is_err());
    }

    #[test]
    fn restricted_linear_branch_is_exact() {
        for &s in &[1.0, 1.3, 2.0, 6.0] {
            let m = restricted(0.3, s);
            for k in 0..30 {
                let w = 0.3 * k as f64 / 30.0;
                let e = m.eval(w).unwrap();
                assert_eq!(e.a_val, 1.0 - w);
                assert_eq!(e.a_prime, -1.0);
                assert_eq!(e.h_val, 0.0);
            }
            // continuity at the boundary
            let above = m.a(0.3 + 1e-13);
            assert!((above - 0.7).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn restricted_weakest_case_has_interior_atom() {
        let m = restricted(0.25, 1.0);
        let atoms = m.atoms();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].loc - 0.25).abs() < 1e-15);
        assert!((atoms[0].mass - 4.0 / 3.0).abs() < 1e-15);
        assert!((atoms[1].mass - 2.0 / 3.0).abs() < 1e-15);
        let e = m.eval(0.25).unwrap();
        assert!((e.h_measure - (e.a_prime + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn upper_examples() {
        let p = UpperRestrictedParams::new(0.75, 2.0).unwrap();
        assert_eq!(eval_upper(0.9, &p).unwrap().a_val, 0.9);
        assert!((eval_upper(0.0, &p).unwrap().a_val - 1.0).abs() < 1e-15);
        assert!(UpperRestrictedParams::new(0.5, 2.0).is_err());
        let below = upper_a(0.75 - 1e-13, &p);
        assert!((below - 0.75).abs() < 1e-12);
    }

    #[test]
    fn upper_reflects_restricted() {
        for &(c, s) in &[(0.75, 1.0), (0.6, 2.0), (0.9, 3.5), (1.0, 1.7)] {
            let up = UpperRestrictedParams::new(c, s).unwrap();
            let lo = RestrictedLogisticParams::new(1.0 - c, s).unwrap();
            for w in grid(200) {
                let a = upper_a(w, &up);
                let b = restricted_a(1.0 - w, &lo);
                assert!((a - b).abs() < 1e-12, "c={c} s={s} w={w}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn interval_examples() {
        let p = IntervalRestrictedParams::new(0.25, 0.75, 1.0).unwrap();
        assert!((eval_interval(0.5, &p).unwrap().a_val - 0.75).abs() < 1e-15);
        assert!((eval_interval(0.25, &p).unwrap().a_val - 0.75).abs() < 1e-15);
        for &s in &[1.0, 2.0, 5.0] {
            let q = IntervalRestrictedParams::new(0.25, 0.75, s).unwrap();
            assert!((interval_a(0.25, &q) - 0.75).abs() < 1e-12);
            assert!((interval_a(0.75, &q) - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn interval_collapses_to_restricted() {
        for &s in &[1.0, 1.5, 2.0, 4.0] {
            let iv = IntervalRestrictedParams::new(0.25, 1.0, s).unwrap();
            let rl = RestrictedLogisticParams::new(0.25, s).unwrap();
            for w in grid(400) {
                assert!((interval_a(w, &iv) - restricted_a(w, &rl)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nadarajah_reductions() {
        let g = NadarajahGeneralParams::new(0.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        let sym = AsymLogisticParams::new(1.0, 1.0, 2.0).unwrap();
        let rl = NadarajahGeneralParams::new(0.25, 1.0, 0.0, 0.0, 2.0).unwrap();
        let r = RestrictedLogisticParams::new(0.25, 2.0).unwrap();
        for k in 1..100 {
            let w = k as f64 / 100.0;
            let a = nadarajah_density(w, &g).unwrap();
            let b = eval_asym(w, &sym).unwrap().h_val;
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            let a = nadarajah_density(w, &rl).unwrap();
            let b = eval_restricted(w, &r).unwrap().h_val;
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
        assert_eq!(nadarajah_density(0.1, &rl).unwrap(), 0.0);
        assert!(nadarajah_density(1.2, &rl).is_err());
        assert!(NadarajahGeneralParams::new(0.1, 0.9, 1.5, 0.6, 2.0).is_err());
        assert!(NadarajahGeneralParams::new(0.1, 0.9, 0.1, 0.1, 1.0).is_err());
    }

    #[test]
    fn stronger_dependence_as_s_grows() {
        let ss = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0];
        for k in 1..40 {
            let w = 0.25 + 0.75 * k as f64 / 40.0;
            let vals: Vec<f64> = ss.iter().map(|&s| restricted(0.25, s).a(w)).collect();
            for pair in vals.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-15, "w={w}: {vals:?}");
            }
        }
    }
}
