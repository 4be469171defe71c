//! Spectral (characteristic) measures on `[0, 1]`: an optional density plus
//! point masses, and quadrature of functions against them.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::quadrature::{integrate, QuadOptions, Quad};

/// A density on a sub-interval `(a, b)` of `[0, 1]`.
pub trait SpectralDensity: Send + Sync {
    fn support(&self) -> (f64, f64);

    /// Density at the point `a + u = b - v`.
    fn eval_offsets(&self, u: f64, v: f64) -> f64;

    /// Masses of `(a, a + d]` and `[b - d, b)` for small `d`, in closed
    /// form when available. Used to absorb endpoint singularities.
    fn end_masses(&self, _d: f64) -> Option<(f64, f64)> {
        None
    }

    /// Closed-form mass of `(a, q]`, when available.
    fn mass_upto(&self, _q: f64) -> Option<f64> {
        None
    }

    fn density(&self, q: f64) -> f64 {
        let (a, b) = self.support();
        if q <= a || q >= b {
            0.0
        } else {
            self.eval_offsets(q - a, b - q)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub loc: f64,
    pub mass: f64,
}

#[derive(Clone, Default)]
pub struct SpectralMeasure {
    pub density: Option<Arc<dyn SpectralDensity>>,
    pub atoms: Vec<Atom>,
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralMeasure")
            .field("density_support", &self.density.as_ref().map(|d| d.support()))
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl SpectralMeasure {
    pub fn atoms_only(atoms: Vec<Atom>) -> Self {
        Self {
            density: None,
            atoms,
        }
    }

    /// Independence: unit masses at both ends.
    pub fn independence() -> Self {
        Self::atoms_only(vec![Atom { loc: 0.0, mass: 1.0 }, Atom { loc: 1.0, mass: 1.0 }])
    }

    /// Perfect dependence: mass 2 at the centre.
    pub fn perfect_dependence() -> Self {
        Self::atoms_only(vec![Atom { loc: 0.5, mass: 2.0 }])
    }

    pub fn atom_at(&self, loc: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.loc == loc)
            .map(|a| a.mass)
            .sum()
    }

    /// `H([0, q])`, except that at `q = 1` the atom at 1 is left out so the
    /// value pairs with the left derivative of the dependence function.
    /// Densities without a closed-form antiderivative yield `None`.
    pub fn mass_upto(&self, q: f64) -> Option<f64> {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.loc <= q && !(q >= 1.0 && a.loc >= 1.0))
            .map(|a| a.mass)
            .sum();
        match &self.density {
            None => Some(atoms),
            Some(d) => d.mass_upto(q).map(|m| m + atoms),
        }
    }

    /// `∫ g dH` over the density plus the atom contributions. `kinks` lists
    /// points where `g` is not smooth.
    pub fn integrate<G: Fn(f64) -> f64>(
        &self,
        g: G,
        kinks: &[f64],
        opts: &QuadOptions,
    ) -> Result<Quad> {
        let atom_part: f64 = self.atoms.iter().map(|a| a.mass * g(a.loc)).sum();
        let dens = match &self.density {
            Some(d) => integrate_density(d.as_ref(), &g, kinks, opts)?,
            None => Quad {
                value: 0.0,
                error: 0.0,
            },
        };
        Ok(Quad {
            value: dens.value + atom_part,
            error: dens.error,
        })
    }

    /// First moments `(∫ q dH, ∫ (1-q) dH)`.
    pub fn moments(&self, opts: &QuadOptions) -> Result<(Quad, Quad)> {
        Ok((
            self.integrate(|q| q, &[], opts)?,
            self.integrate(|q| 1.0 - q, &[], opts)?,
        ))
    }
}

/// Offsets below `HEAD * U` from an end of the support are handled through
/// the closed-form end mass instead of quadrature.
const HEAD: f64 = 1e-12;

/// `∫_0^{u1} f(u) du` for an integrand that may be singular at `u = 0`:
/// the head `[0, HEAD u1]` contributes `g_end * head_mass`, the rest is
/// integrated in `tau = ln u`, where power-law ends become smooth.
fn end_segment<F: Fn(f64) -> f64>(f: F, u1: f64, g_end: f64, head_mass: f64, opts: &QuadOptions) -> Result<Quad> {
    let delta = HEAD * u1;
    let body = integrate(
        |tau: f64| {
            let u = tau.exp();
            f(u) * u
        },
        delta.ln(),
        u1.ln(),
        opts,
    )?;
    Ok(Quad {
        value: body.value + g_end * head_mass,
        error: body.error + (head_mass * 1e-12).abs(),
    })
}

/// Splits the support at its midpoint and at the kinks and works in offsets
/// from the nearer end.
fn integrate_density(
    d: &dyn SpectralDensity,
    g: &dyn Fn(f64) -> f64,
    kinks: &[f64],
    opts: &QuadOptions,
) -> Result<Quad> {
    let (a, b) = d.support();
    let len = b - a;
    let half = 0.5 * len;

    let mut lower = vec![0.0, half];
    let mut upper = vec![0.0, len - half];
    for &k in kinks {
        if k > a && k < a + half {
            lower.push(k - a);
        } else if k >= a + half && k < b {
            upper.push(b - k);
        }
    }
    for offs in [&mut lower, &mut upper] {
        offs.sort_by(f64::total_cmp);
        offs.dedup();
    }

    let mut acc = Quad {
        value: 0.0,
        error: 0.0,
    };
    // lower half: q = a + u
    for w in lower.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        let f = |u: f64| g(a + u) * d.eval_offsets(u, len - u);
        let q = if u0 == 0.0 {
            let head = d.end_masses(HEAD * u1).map_or(0.0, |m| m.0);
            end_segment(f, u1, g(a), head, opts)?
        } else {
            integrate(f, u0, u1, opts)?
        };
        acc = acc + q;
    }
    // upper half: q = b - v
    for w in upper.windows(2) {
        let (v0, v1) = (w[0], w[1]);
        let f = |v: f64| g(b - v) * d.eval_offsets(len - v, v);
        let q = if v0 == 0.0 {
            let head = d.end_masses(HEAD * v1).map_or(0.0, |m| m.1);
            end_segment(f, v1, g(b), head, opts)?
        } else {
            integrate(f, v0, v1, opts)?
        };
        acc = acc + q;
    }
    Ok(acc)
}

/// Dependence function by quadrature:
/// `A(w) = ∫ max{(1-w) q, w (1-q)} dH(q)`, kink at `q = w`.
pub fn a_numeric_oracle(omega: f64, measure: &SpectralMeasure, opts: &QuadOptions) -> Result<Quad> {
    measure.integrate(
        |q| ((1.0 - omega) * q).max(omega * (1.0 - q)),
        &[omega],
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::logistic::LogisticDensity;

    /// Triangular kernel of total mass `mass` centred at `centre`.
    struct Triangle {
        centre: f64,
        width: f64,
        mass: f64,
    }

    impl SpectralDensity for Triangle {
        fn support(&self) -> (f64, f64) {
            (self.centre - self.width, self.centre + self.width)
        }
        fn eval_offsets(&self, u: f64, v: f64) -> f64 {
            self.mass * u.min(v) / (self.width * self.width)
        }
    }

    #[test]
    fn independence_gives_unit_dependence() {
        let m = SpectralMeasure::independence();
        for k in 0..=10 {
            let w = k as f64 / 10.0;
            let a = a_numeric_oracle(w, &m, &QuadOptions::default()).unwrap();
            assert!((a.value - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn narrow_kernel_approaches_perfect_dependence() {
        let width = 1e-4;
        let m = SpectralMeasure {
            density: Some(Arc::new(Triangle {
                centre: 0.5,
                width,
                mass: 2.0,
            })),
            atoms: vec![],
        };
        for k in 0..=20 {
            let w = k as f64 / 20.0;
            let a = a_numeric_oracle(w, &m, &QuadOptions::default()).unwrap().value;
            assert!((a - w.max(1.0 - w)).abs() < 2.0 * width, "w={w}: {a}");
        }
    }

    #[test]
    fn singular_density_total_mass() {
        // s = 1.2 has an endpoint singularity of order -0.8
        let d = LogisticDensity::new(0.25, 1.0, 1.0, 0.5, 1.2);
        let m = SpectralMeasure {
            density: Some(Arc::new(d)),
            atoms: vec![],
        };
        let total = m.integrate(|_| 1.0, &[], &QuadOptions::default()).unwrap();
        assert!((total.value - 2.0).abs() < 1e-9, "{}", total.value);
        let (m1, m2) = m.moments(&QuadOptions::default()).unwrap();
        assert!((m1.value - 1.0).abs() < 1e-9);
        assert!((m2.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mass_upto_excludes_atom_at_one() {
        let m = SpectralMeasure::independence();
        assert_eq!(m.mass_upto(0.0), Some(1.0));
        assert_eq!(m.mass_upto(0.7), Some(1.0));
        assert_eq!(m.mass_upto(1.0), Some(1.0));
        assert_eq!(m.atom_at(1.0), 1.0);
    }
}
