//! Ordered bivariate extreme-value models for minima.

pub mod cli;
pub mod dependence;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod margins;
pub mod measure;
pub mod quadrature;
pub mod series;
pub mod simulate;

pub use error::{BevmError, Result};
