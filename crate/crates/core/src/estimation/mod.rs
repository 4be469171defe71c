//! Non-parametric and penalized-likelihood estimation.

mod bfgs;
mod fit;
mod pickands;
mod trend;

pub use bfgs::{minimize, numeric_gradient, BfgsOptions, BfgsOutcome};
pub use fit::{fit_restricted, fitted_exp_pairs, FitConfig, FitResult, FitStart, TraceRow};
pub use pickands::{
    estimate_c_hat, omega_grid, pickands_curve, pickands_modified, pickands_raw, PickandsCurve,
    PickandsVariant, DEFAULT_GRID,
};
pub use trend::{roughness, second_difference_rows, trend_penalized, TrendOptions};
