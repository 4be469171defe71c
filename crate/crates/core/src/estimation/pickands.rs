//! Non-parametric estimates of the dependence function and of the ordering
//! boundary from exponential-scale pairs.

use serde::{Deserialize, Serialize};

use crate::error::{BevmError, Result};
use crate::measure::ExpPair;

/// Default number of grid points for estimated curves.
pub const DEFAULT_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PickandsVariant {
    Raw,
    Modified,
}

impl PickandsVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PickandsVariant::Raw => "raw",
            PickandsVariant::Modified => "modified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsCurve {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub variant: PickandsVariant,
}

fn non_empty(sample: &[ExpPair]) -> Result<()> {
    if sample.is_empty() {
        Err(BevmError::input("empty sample"))
    } else {
        Ok(())
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if (0.0..=1.0).contains(&omega) {
        Ok(())
    } else {
        Err(BevmError::domain(format!("w must lie in [0, 1], got {omega}")))
    }
}

/// `n / Σ min(X_i/(1-w), Y_i/w)`. At the endpoints this reduces to
/// `1/X̄` and `1/Ȳ`, which need not equal 1.
pub fn pickands_raw(sample: &[ExpPair], omega: f64) -> Result<f64> {
    non_empty(sample)?;
    check_omega(omega)?;
    let total: f64 = sample
        .iter()
        .map(|p| (p.x_e / (1.0 - omega)).min(p.y_e / omega))
        .sum();
    Ok(sample.len() as f64 / total)
}

fn means(sample: &[ExpPair]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mx = sample.iter().map(|p| p.x_e).sum::<f64>() / n;
    let my = sample.iter().map(|p| p.y_e).sum::<f64>() / n;
    (mx, my)
}

fn modified_with_means(sample: &[ExpPair], omega: f64, mx: f64, my: f64) -> f64 {
    if omega == 0.0 || omega == 1.0 {
        return 1.0;
    }
    let total: f64 = sample
        .iter()
        .map(|p| (p.x_e / ((1.0 - omega) * mx)).min(p.y_e / (omega * my)))
        .sum();
    // the bound holds exactly in real arithmetic; guard against rounding
    (sample.len() as f64 / total).max(omega.max(1.0 - omega))
}

/// Mean-rescaled estimator: `n / Σ min(X_i/((1-w) X̄), Y_i/(w Ȳ))`.
/// Equals 1 at both endpoints and never falls below `max(w, 1-w)`.
pub fn pickands_modified(sample: &[ExpPair], omega: f64) -> Result<f64> {
    non_empty(sample)?;
    check_omega(omega)?;
    let (mx, my) = means(sample);
    Ok(modified_with_means(sample, omega, mx, my))
}

/// `n` equally spaced points on `[0, 1]`.
pub fn omega_grid(n: usize) -> Vec<f64> {
    crate::series::unit_grid(n.max(2))
}

pub fn pickands_curve(
    sample: &[ExpPair],
    omegas: &[f64],
    variant: PickandsVariant,
) -> Result<PickandsCurve> {
    non_empty(sample)?;
    let (mx, my) = means(sample);
    let values = omegas
        .iter()
        .map(|&w| {
            check_omega(w)?;
            Ok(match variant {
                PickandsVariant::Raw => pickands_raw(sample, w)?,
                PickandsVariant::Modified => modified_with_means(sample, w, mx, my),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PickandsCurve {
        omegas: omegas.to_vec(),
        values,
        variant,
    })
}

/// Minimum observed y-fraction `Y_i / (X_i + Y_i)`. Under an ordered model
/// with boundary `c` every fraction exceeds `c`, so this never undershoots.
pub fn estimate_c_hat(sample: &[ExpPair]) -> Result<f64> {
    non_empty(sample)?;
    Ok(sample
        .iter()
        .map(ExpPair::omega)
        .fold(f64::INFINITY, f64::min))
}
