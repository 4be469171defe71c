//! End-to-end replicated study: simulate, fit every replicate, and write the
//! summary together with the plot tables of the first replicate.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dependence::{DependenceModel, RestrictedLogisticParams};
use crate::diagnostics::{
    depfn_curves, merge_curves, parameter_table, pp_qq_tables, scatter_table, study_means_table, trace_table,
    CurveTable, EstimatorInput,
};
use crate::error::{BevmError, Result};
use crate::estimation::{estimate_c_hat, fit_restricted, fitted_exp_pairs, omega_grid, FitConfig, FitResult, DEFAULT_GRID};
use crate::margins::TrendingMargin;
use crate::measure::c_from_trending_margins;
use crate::series::unit_grid;
use crate::simulate::{run_study, StudyConfig, STUDY_LAMBDA, STUDY_N_REPS, STUDY_N_TIMES};

/// Tunable parts of the study; the margins are always the reference
/// trends `100 - 40 t` and `150 - 40 t` with scales 4 and 2 and shape 0.2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySettings {
    pub seed: u64,
    pub n_reps: usize,
    pub n_times: usize,
    pub lambda: f64,
    pub s: f64,
}

/// True scalar parameters of the reference design.
pub const TRUTH: [f64; 4] = [2.0, 4.0, 2.0, 0.2];

impl StudySettings {
    pub fn reference(seed: u64) -> Self {
        Self {
            seed,
            n_reps: STUDY_N_REPS,
            n_times: STUDY_N_TIMES,
            lambda: STUDY_LAMBDA,
            s: TRUTH[0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(BevmError::param("reps must be >= 1"));
        }
        if self.n_times < 3 {
            return Err(BevmError::param("n-times must be >= 3"));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(BevmError::param("lambda must be >= 0"));
        }
        RestrictedLogisticParams::new(0.0, self.s)?;
        Ok(())
    }

    pub fn config(&self) -> Result<StudyConfig> {
        self.validate()?;
        let margin_x = TrendingMargin::linear(100.0, -40.0, TRUTH[1], TRUTH[3])?;
        let margin_y = TrendingMargin::linear(150.0, -40.0, TRUTH[2], TRUTH[3])?;
        let times = unit_grid(self.n_times);
        let c = c_from_trending_margins(&margin_x, &margin_y, &times, None)?.c;
        Ok(StudyConfig {
            n_reps: self.n_reps,
            times,
            margin_x,
            margin_y,
            model: DependenceModel::Restricted(RestrictedLogisticParams::new(c, self.s)?),
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub s: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub xi: f64,
    /// Boundary implied by the fitted margins.
    pub c_hat: f64,
    /// Minimum y-fraction under the fitted margins.
    pub c_hat_pickands: f64,
    /// Minimum y-fraction under the true margins.
    pub c_pickands_true_margins: f64,
    pub within_half: bool,
    pub ordered: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub settings: StudySettings,
    pub truth: [f64; 4],
    /// Boundary of the simulated model, from the true margins.
    pub c_true: f64,
    pub median_c_pickands_true_margins: f64,
    /// Means over replicates of `(s, sigma_x, sigma_y, xi, c_hat, c_hat_pickands)`.
    pub mean_estimates: [f64; 6],
    /// Replicates with every estimate within 50% of the truth and
    /// `c_hat < c_hat_pickands`.
    pub n_accurate: usize,
    pub replicates: Vec<ReplicateSummary>,
}

impl StudyReport {
    pub fn summary_lines(&self) -> Vec<String> {
        let st = &self.settings;
        let m = &self.mean_estimates;
        vec![
            format!(
                "design: s={} sigma_x={} sigma_y={} xi={}; {} replicates of {} times; lambda={}; seed {}",
                st.s, TRUTH[1], TRUTH[2], TRUTH[3], st.n_reps, st.n_times, st.lambda, st.seed
            ),
            format!("parametric c (true margins): {:.6}", self.c_true),
            format!(
                "pickands c (true margins, median over replicates): {:.6}",
                self.median_c_pickands_true_margins
            ),
            format!(
                "mean estimates: s={:.4} sigma_x={:.4} sigma_y={:.4} xi={:.4}",
                m[0], m[1], m[2], m[3]
            ),
            format!(
                "mean c (fitted margins): parametric {:.6}, pickands {:.6}",
                m[4], m[5]
            ),
            format!(
                "replicates within 50% of truth with parametric c < pickands c: {}/{}",
                self.n_accurate,
                self.replicates.len()
            ),
        ]
    }
}

fn within_half(fit: &FitResult, truth: &[f64; 4]) -> bool {
    [fit.s, fit.sigma_x, fit.sigma_y, fit.xi]
        .iter()
        .zip(truth)
        .all(|(v, t)| (v - t).abs() <= 0.5 * t.abs())
}

fn write(table: &CurveTable, dir: &Path, name: &str, svg: bool) -> Result<()> {
    table.write_csv(&dir.join(format!("{name}.csv")))?;
    if svg {
        table.write_svg(&dir.join(format!("{name}.svg")))?;
    }
    Ok(())
}

/// Runs the study and writes `estimates.csv`, `replicate_means.csv`,
/// `data.csv`, `trace.csv`, `depfn.csv`, `pp.csv`, `qq.csv` and
/// `summary.json` into `dir`. Plot tables describe replicate 0.
pub fn run_study_pipeline(settings: &StudySettings, dir: &Path, svg: bool) -> Result<StudyReport> {
    let cfg = settings.config()?;
    let out = run_study(&cfg)?;
    let fits: Vec<FitResult> = out
        .series
        .par_iter()
        .map(|s| fit_restricted(s, settings.lambda, settings.lambda, &FitConfig::default()))
        .collect::<Result<_>>()?;
    let truth = [settings.s, TRUTH[1], TRUTH[2], TRUTH[3]];
    let mut replicates = Vec::with_capacity(fits.len());
    for (series, fit) in out.series.iter().zip(&fits) {
        let true_pairs = series.to_exp_scale(&cfg.margin_x, &cfg.margin_y)?.exp_pairs()?;
        let ordered = fit.c_hat < fit.c_hat_pickands;
        replicates.push(ReplicateSummary {
            s: fit.s,
            sigma_x: fit.sigma_x,
            sigma_y: fit.sigma_y,
            xi: fit.xi,
            c_hat: fit.c_hat,
            c_hat_pickands: fit.c_hat_pickands,
            c_pickands_true_margins: estimate_c_hat(&true_pairs)?,
            within_half: within_half(fit, &truth),
            ordered,
            converged: fit.converged,
        });
    }
    let n = replicates.len() as f64;
    let mean = |f: fn(&ReplicateSummary) -> f64| replicates.iter().map(f).sum::<f64>() / n;
    let mean_estimates = [
        mean(|r| r.s),
        mean(|r| r.sigma_x),
        mean(|r| r.sigma_y),
        mean(|r| r.xi),
        mean(|r| r.c_hat),
        mean(|r| r.c_hat_pickands),
    ];
    let mut cp: Vec<f64> = replicates.iter().map(|r| r.c_pickands_true_margins).collect();
    cp.sort_by(f64::total_cmp);
    let median = if cp.len() % 2 == 1 {
        cp[cp.len() / 2]
    } else {
        0.5 * (cp[cp.len() / 2 - 1] + cp[cp.len() / 2])
    };
    let c_true = match cfg.model {
        DependenceModel::Restricted(p) => p.c,
        _ => unreachable!("study model is restricted"),
    };
    let report = StudyReport {
        settings: settings.clone(),
        truth,
        c_true,
        median_c_pickands_true_margins: median,
        mean_estimates,
        n_accurate: replicates.iter().filter(|r| r.within_half && r.ordered).count(),
        replicates,
    };

    let mut estimates = parameter_table(&fits)?;
    estimates.set_meta("c_true", c_true);
    write(&estimates, dir, "estimates", false)?;
    write(&study_means_table(&out.summary)?, dir, "replicate_means", svg)?;
    let (series0, fit0) = (&out.series[0], &fits[0]);
    write(&scatter_table(series0, Some(fit0))?, dir, "data", svg)?;
    write(&trace_table(fit0)?, dir, "trace", svg)?;
    let true_pairs = series0.to_exp_scale(&cfg.margin_x, &cfg.margin_y)?.exp_pairs()?;
    let curves = depfn_curves(
        &[cfg.model, fit0.model()?],
        &[
            EstimatorInput {
                label: "pickands_true_margins".into(),
                sample: true_pairs,
            },
            EstimatorInput {
                label: "pickands_fitted_margins".into(),
                sample: fitted_exp_pairs(series0, fit0)?,
            },
        ],
        &omega_grid(DEFAULT_GRID),
    )?;
    let mut curves = curves;
    curves[0].label = format!("true {}", curves[0].label);
    curves[1].label = format!("fitted {}", curves[1].label);
    write(&merge_curves("dependence functions", &curves)?, dir, "depfn", svg)?;
    let (pp, qq) = pp_qq_tables(series0, fit0)?;
    write(&pp, dir, "pp", svg)?;
    write(&qq, dir, "qq", svg)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| BevmError::Numeric {
        message: format!("cannot encode study report: {e}"),
        achieved: f64::NAN,
    })?;
    std::fs::write(dir.join("summary.json"), json + "\n")
        .map_err(|e| BevmError::Io(format!("{}: {e}", dir.display())))?;
    Ok(report)
}
