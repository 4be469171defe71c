//! Sampling ordered pairs by conditional inversion, and the replicated
//! simulation study with trending GEVM margins.
//!
//! `X ~ Exp(1)` is drawn first; `Y` then solves
//! `Pr(Y > y | X = x) = V_x(x, y) exp(x - V(x, y)) = U` by bisection on the
//! y-fraction `w = y / (x + y)`, which keeps the search on a bounded bracket.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dependence::{DependenceModel, RestrictedLogisticParams};
use crate::error::{BevmError, Result};
use crate::margins::{exp_scale_inverse, TrendingMargin};
use crate::measure::{c_from_trending_margins, model_partials, ExpPair};
use crate::series::{unit_grid, BivariateSeries, MarginScale};

const BISECTION_WIDTH: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;

/// Generator for replicate `stream` of a study seeded with `seed`.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `Pr(Y > y | X = x)`, written in terms of the y-fraction.
fn conditional_survival(x: f64, omega: f64, model: &DependenceModel) -> Result<f64> {
    if omega <= 0.0 {
        return Ok(1.0);
    }
    if omega >= 1.0 {
        return Ok(0.0);
    }
    let y = x * omega / (1.0 - omega);
    if !(y > 0.0) || !y.is_finite() {
        return Ok(if y > 0.0 { 0.0 } else { 1.0 });
    }
    let d = model_partials(&ExpPair { x_e: x, y_e: y }, model)?;
    Ok((d.vx * (x - d.v).exp()).clamp(0.0, 1.0))
}

/// Draws one exponential-scale pair from `model`.
pub fn sample_pair<R: Rng + ?Sized>(model: &DependenceModel, rng: &mut R) -> Result<ExpPair> {
    let x = loop {
        let e: f64 = rng.sample(Exp1);
        if e > 0.0 {
            break e;
        }
    };
    // in (0, 1]
    let u = 1.0 - rng.random::<f64>();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iter = 0;
    while hi - lo > BISECTION_WIDTH {
        if iter == BISECTION_MAX_ITER {
            return Err(BevmError::Numeric {
                message: "conditional inversion did not converge".into(),
                achieved: hi - lo,
            });
        }
        let mid = 0.5 * (lo + hi);
        let s = conditional_survival(x, mid, model)?;
        if !s.is_finite() {
            return Err(BevmError::Numeric {
                message: format!("non-finite conditional survival at w = {mid}"),
                achieved: hi - lo,
            });
        }
        if s >= u {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    // hi lies strictly above every w with survival 1, hence above c
    let w = if hi < 1.0 { hi } else { 0.5 * (lo + hi) };
    ExpPair::new(x, x * w / (1.0 - w))
}

pub fn sample_pairs<R: Rng + ?Sized>(
    model: &DependenceModel,
    n: usize,
    rng: &mut R,
) -> Result<Vec<ExpPair>> {
    (0..n).map(|_| sample_pair(model, rng)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n_reps: usize,
    pub times: Vec<f64>,
    pub margin_x: TrendingMargin,
    pub margin_y: TrendingMargin,
    pub model: DependenceModel,
    pub seed: u64,
}

/// Observation times per replicate in the reference design.
pub const STUDY_N_TIMES: usize = 200;
pub const STUDY_N_REPS: usize = 50;
pub const STUDY_LAMBDA: f64 = 1000.0;

impl StudyConfig {
    /// The reference design: `s = 2`, `mu_x(t) = 100 - 40 t`,
    /// `mu_y(t) = 150 - 40 t`, `sigma_x = 4`, `sigma_y = 2`, `xi = 0.2`, with
    /// the restricted model at the boundary implied by the true margins.
    pub fn reference_design(seed: u64) -> Result<Self> {
        let margin_x = TrendingMargin::linear(100.0, -40.0, 4.0, 0.2)?;
        let margin_y = TrendingMargin::linear(150.0, -40.0, 2.0, 0.2)?;
        let times = unit_grid(STUDY_N_TIMES);
        let c = c_from_trending_margins(&margin_x, &margin_y, &times, None)?.c;
        Ok(Self {
            n_reps: STUDY_N_REPS,
            times,
            margin_x,
            margin_y,
            model: DependenceModel::Restricted(RestrictedLogisticParams::new(c, 2.0)?),
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(BevmError::param("n_reps must be >= 1"));
        }
        if self.times.is_empty() {
            return Err(BevmError::param("times must be non-empty"));
        }
        self.margin_x.validate(self.times.len())?;
        self.margin_y.validate(self.times.len())?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub times: Vec<f64>,
    /// Share of points with `x < y`, per replicate.
    pub ordering_fraction: Vec<f64>,
    /// Across-replicate means at each time.
    pub mean_x: Vec<f64>,
    pub mean_y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutput {
    pub series: Vec<BivariateSeries>,
    pub summary: StudySummary,
}

/// One replicate on the data scale.
pub fn simulate_replicate(cfg: &StudyConfig, replicate: usize) -> Result<BivariateSeries> {
    let mut rng = replicate_rng(cfg.seed, replicate as u64);
    let n = cfg.times.len();
    let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for (i, &t) in cfg.times.iter().enumerate() {
        let p = sample_pair(&cfg.model, &mut rng)?;
        x.push(exp_scale_inverse(p.x_e, &cfg.margin_x.at(i, t)?)?);
        y.push(exp_scale_inverse(p.y_e, &cfg.margin_y.at(i, t)?)?);
    }
    BivariateSeries::new(cfg.times.clone(), x, y, MarginScale::Original)
}

/// Runs every replicate in parallel; replicate `r` uses stream `r` of the
/// seed, so results do not depend on scheduling.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let series: Vec<BivariateSeries> = (0..cfg.n_reps)
        .into_par_iter()
        .map(|r| simulate_replicate(cfg, r))
        .collect::<Result<_>>()?;
    let n = cfg.times.len();
    let reps = series.len() as f64;
    let ordering_fraction = series
        .iter()
        .map(|s| (0..n).filter(|&i| s.x[i] < s.y[i]).count() as f64 / n as f64)
        .collect();
    let mean_x = (0..n).map(|i| series.iter().map(|s| s.x[i]).sum::<f64>() / reps).collect();
    let mean_y = (0..n).map(|i| series.iter().map(|s| s.y[i]).sum::<f64>() / reps).collect();
    Ok(StudyOutput {
        summary: StudySummary {
            times: cfg.times.clone(),
            ordering_fraction,
            mean_x,
            mean_y,
        },
        series,
    })
}
