//! Command-line front end.
//!
//! Settings may come from `--config FILE`, a `key = value` file whose keys
//! are the long flag names of the subcommand. File entries are spliced in
//! ahead of the command-line flags, so explicit flags win. Exit status is 0
//! on success, 1 on runtime failure and 2 on usage errors.

mod study;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dependence::{
    validate_dependence, AsymLogisticParams, DependenceModel, IntervalRestrictedParams, RestrictedLogisticParams,
    UpperRestrictedParams,
};
use crate::diagnostics::{
    depfn_curves, max_pp_deviation, merge_curves, pp_qq_tables, scatter_table, trace_table, CurveTable,
    EstimatorInput, KS_95,
};
use crate::error::BevmError;
use crate::estimation::{estimate_c_hat, fit_restricted, fitted_exp_pairs, omega_grid, FitConfig, FitResult};
use crate::margins::TrendingMargin;
use crate::series::{unit_grid, BivariateSeries, MarginScale};
use crate::simulate::{replicate_rng, sample_pairs, simulate_replicate, StudyConfig, STUDY_LAMBDA};

pub use study::{run_study_pipeline, ReplicateSummary, StudyReport, StudySettings};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "BEVM_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] BevmError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parameter problems found before any work starts are usage errors.
fn usage<T>(r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Parser)]
#[command(name = "bevm", version, about = "Ordered bivariate extreme-value models for minima")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw pairs from a dependence model.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Fit the restricted model with penalized location trends.
    #[command(args_override_self = true)]
    Fit(FitArgs),
    /// Tabulate dependence functions and estimates.
    #[command(args_override_self = true)]
    Depfn(DepfnArgs),
    /// Minimum observed y-fraction of exponential-scale pairs.
    #[command(args_override_self = true)]
    EstimateC(EstimateCArgs),
    /// Probability, quantile, trend and trace tables for a fitted series.
    #[command(args_override_self = true)]
    Diagnose(DiagnoseArgs),
    /// Check a dependence model for validity.
    #[command(args_override_self = true)]
    Validate(ValidateArgs),
    /// Replicated simulation and fitting study.
    #[command(args_override_self = true)]
    Study(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Restricted,
    Asym,
    Upper,
    Interval,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = Family::Restricted)]
    pub family: Family,
    /// Boundary of the restricted and upper families.
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    pub c2: f64,
}

impl ModelArgs {
    pub fn model(&self) -> crate::Result<DependenceModel> {
        Ok(match self.family {
            Family::Restricted => DependenceModel::Restricted(RestrictedLogisticParams::new(self.c, self.s)?),
            Family::Asym => DependenceModel::Asym(AsymLogisticParams::new(self.theta1, self.theta2, self.s)?),
            Family::Upper => DependenceModel::Upper(UpperRestrictedParams::new(self.c, self.s)?),
            Family::Interval => {
                DependenceModel::Interval(IntervalRestrictedParams::new(self.c1, self.c2, self.s)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputScale {
    Exponential,
    Original,
}

#[derive(Debug, Clone, Args)]
pub struct MarginArgs {
    #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
    pub mu_x: f64,
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    pub slope_x: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub sigma_x: f64,
    #[arg(long, default_value_t = 150.0, allow_hyphen_values = true)]
    pub mu_y: f64,
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    pub slope_y: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub sigma_y: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub xi: f64,
}

impl MarginArgs {
    fn margins(&self) -> crate::Result<(TrendingMargin, TrendingMargin)> {
        Ok((
            TrendingMargin::linear(self.mu_x, self.slope_x, self.sigma_x, self.xi)?,
            TrendingMargin::linear(self.mu_y, self.slope_y, self.sigma_y, self.xi)?,
        ))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of pairs.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Exponential margins, or GEVM margins with linear location trends.
    #[arg(long, value_enum, default_value_t = OutputScale::Exponential)]
    pub scale: OutputScale,
    #[command(flatten)]
    pub margins: MarginArgs,
    /// Output CSV; defaults to stdout, or simulate.csv in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV with columns t,x,y on the original scale.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = STUDY_LAMBDA)]
    pub lambda_x: f64,
    #[arg(long, default_value_t = STUDY_LAMBDA)]
    pub lambda_y: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// JSON result; defaults to stdout, or fit.json in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional CSV of the outer-iteration trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DepfnArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of equally spaced grid points on [0, 1].
    #[arg(long, default_value_t = crate::estimation::DEFAULT_GRID)]
    pub grid: usize,
    /// Optional exponential-scale sample to add a modified Pickands estimate.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output CSV; defaults to stdout, or depfn.csv in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateCArgs {
    /// CSV of exponential- or Fréchet-scale pairs, or original-scale data
    /// together with `--fit`.
    #[arg(long)]
    pub input: PathBuf,
    /// Fit whose margins map original-scale input to exponential margins.
    #[arg(long)]
    pub fit: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// CSV with columns t,x,y on the original scale.
    #[arg(long)]
    pub input: PathBuf,
    /// Existing fit; without it the data are fitted first.
    #[arg(long)]
    pub fit: Option<PathBuf>,
    #[arg(long, default_value_t = STUDY_LAMBDA)]
    pub lambda_x: f64,
    #[arg(long, default_value_t = STUDY_LAMBDA)]
    pub lambda_y: f64,
    #[arg(long, default_value_t = crate::estimation::DEFAULT_GRID)]
    pub grid: usize,
    /// Directory for the tables; defaults to the output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write an SVG next to each table.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = crate::estimation::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// Pin the reference design; design flags are then refused.
    #[arg(long = "paper-defaults", conflicts_with_all = ["reps", "n_times", "lambda", "s"])]
    pub reference_defaults: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub n_times: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Dependence strength of the simulated restricted model.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Messages go to stdout and errors to stderr.
pub fn run(argv: Vec<OsString>) -> i32 {
    let argv = match splice_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Replaces `--config FILE` by the file's entries, placed right after the
/// subcommand name so that later command-line flags override them.
pub fn splice_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            let path = it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            config = Some(PathBuf::from(path));
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    // the subcommand is the first token after the program name
    let Some(sub) = rest.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Err(CliError::Usage("--config must accompany a subcommand".into()));
    };
    let entries = read_config(&path)?;
    let app = Cli::command();
    let cmd = app
        .find_subcommand(&sub)
        .ok_or_else(|| CliError::Usage(format!("unknown command '{sub}'")))?;
    let mut spliced = Vec::new();
    for (key, value) in entries {
        let flag = key.replace('_', "-");
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(flag.as_str()))
            .ok_or_else(|| CliError::Usage(format!("{}: unknown key '{key}' for '{sub}'", path.display())))?;
        if arg.get_action().takes_values() {
            spliced.push(OsString::from(format!("--{flag}={value}")));
        } else {
            match value.as_str() {
                "true" => spliced.push(OsString::from(format!("--{flag}"))),
                "false" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "{}: key '{key}' expects true or false, got '{value}'",
                        path.display()
                    )))
                }
            }
        }
    }
    let mut out = rest[..2].to_vec();
    out.extend(spliced);
    out.extend(rest.into_iter().skip(2));
    Ok(out)
}

fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key = value", path.display(), i + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Output directory from the environment, falling back to `bevm-output`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("bevm-output"))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| BevmError::Io(format!("{}: {e}", dir.display())).into())
}

/// Writes `text` to `out`, to `name` in the environment's output directory,
/// or to stdout, in that order of preference.
fn emit(text: &str, out: Option<&Path>, name: &str, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let target = out.map(Path::to_path_buf).or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(name)));
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                ensure_dir(parent)?;
            }
            std::fs::write(&path, text).map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))?;
            Ok(())
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| BevmError::Io(e.to_string()).into()),
    }
}

fn say(stdout: &mut dyn std::io::Write, line: &str) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(|e| BevmError::Io(e.to_string()).into())
}

/// Compact decimal rendering with at most 12 fractional digits.
pub fn format_number(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" || s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn read_fit(path: &Path) -> CliResult<FitResult> {
    let text = std::fs::read_to_string(path).map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| BevmError::Input(format!("{}: not a fit result: {e}", path.display())).into())
}

fn fit_json(fit: &FitResult) -> CliResult<String> {
    serde_json::to_string_pretty(fit)
        .map(|s| s + "\n")
        .map_err(|e| BevmError::Numeric { message: format!("cannot encode fit: {e}"), achieved: f64::NAN }.into())
}

fn check_grid(n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::Usage(format!("--grid must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_lambda(name: &str, v: f64) -> CliResult<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(CliError::Usage(format!("--{name} must be a finite value >= 0, got {v}")));
    }
    Ok(())
}

pub fn execute(command: Command, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    match command {
        Command::Simulate(a) => simulate(a, stdout),
        Command::Fit(a) => fit(a, stdout),
        Command::Depfn(a) => depfn(a, stdout),
        Command::EstimateC(a) => estimate_c(a, stdout),
        Command::Diagnose(a) => diagnose(a, stdout),
        Command::Validate(a) => validate(a, stdout),
        Command::Study(a) => study_command(a, stdout),
    }
}

fn simulate(a: SimulateArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let model = usage(a.model.model())?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be >= 1".into()));
    }
    let series = match a.scale {
        OutputScale::Exponential => {
            let mut rng = replicate_rng(a.seed, 0);
            let pairs = sample_pairs(&model, a.n, &mut rng)?;
            BivariateSeries::from_pairs(&pairs)
        }
        OutputScale::Original => {
            let (margin_x, margin_y) = usage(a.margins.margins())?;
            let cfg = StudyConfig {
                n_reps: 1,
                times: unit_grid(a.n),
                margin_x,
                margin_y,
                model,
                seed: a.seed,
            };
            usage(cfg.validate())?;
            simulate_replicate(&cfg, 0)?
        }
    };
    emit(&series.to_csv_string(), a.out.as_deref(), "simulate.csv", stdout)
}

fn fit(a: FitArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    check_lambda("lambda-x", a.lambda_x)?;
    check_lambda("lambda-y", a.lambda_y)?;
    if !(a.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be >= 0, got {}", a.tol)));
    }
    let series = BivariateSeries::read_csv(&a.input, MarginScale::Original)?;
    let config = FitConfig {
        max_iter: a.max_iter,
        tol: a.tol,
        ..FitConfig::default()
    };
    let result = fit_restricted(&series, a.lambda_x, a.lambda_y, &config)?;
    if let Some(w) = &result.warning {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.trace {
        trace_table(&result)?.write_csv(path)?;
    }
    emit(&fit_json(&result)?, a.out.as_deref(), "fit.json", stdout)
}

fn depfn(a: DepfnArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let model = usage(a.model.model())?;
    check_grid(a.grid)?;
    let mut estimators = Vec::new();
    if let Some(path) = &a.input {
        let series = BivariateSeries::read_csv(path, MarginScale::Exponential)?;
        estimators.push(EstimatorInput {
            label: "pickands_modified".into(),
            sample: series.exp_pairs()?,
        });
    }
    let tables = depfn_curves(&[model], &estimators, &omega_grid(a.grid))?;
    let mut wide = merge_curves("dependence functions", &tables)?;
    wide.set_meta("model", model.label());
    if let Some(svg) = &a.svg {
        wide.write_svg(svg)?;
    }
    emit(&wide.to_csv_string(), a.out.as_deref(), "depfn.csv", stdout)
}

fn estimate_c(a: EstimateCArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let series = BivariateSeries::read_csv(&a.input, MarginScale::Exponential)?;
    let pairs = match (series.scale, &a.fit) {
        (MarginScale::Original, Some(path)) => fitted_exp_pairs(&series, &read_fit(path)?)?,
        (MarginScale::Original, None) => {
            return Err(CliError::Usage(
                "input is on the original scale; pass --fit to map it to exponential margins".into(),
            ))
        }
        _ => series.exp_pairs()?,
    };
    say(stdout, &format_number(estimate_c_hat(&pairs)?))
}

fn table_out(table: &CurveTable, dir: &Path, name: &str, svg: bool) -> CliResult<()> {
    table.write_csv(&dir.join(format!("{name}.csv")))?;
    if svg {
        table.write_svg(&dir.join(format!("{name}.svg")))?;
    }
    Ok(())
}

fn diagnose(a: DiagnoseArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    check_lambda("lambda-x", a.lambda_x)?;
    check_lambda("lambda-y", a.lambda_y)?;
    check_grid(a.grid)?;
    let series = BivariateSeries::read_csv(&a.input, MarginScale::Original)?;
    let fit = match &a.fit {
        Some(p) => read_fit(p)?,
        None => fit_restricted(&series, a.lambda_x, a.lambda_y, &FitConfig::default())?,
    };
    let dir = a.out_dir.clone().unwrap_or_else(default_output_dir);
    ensure_dir(&dir)?;
    let (pp, qq) = pp_qq_tables(&series, &fit)?;
    let pairs = fitted_exp_pairs(&series, &fit)?;
    let curves = depfn_curves(
        &[fit.model()?],
        &[EstimatorInput {
            label: "pickands_modified".into(),
            sample: pairs,
        }],
        &omega_grid(a.grid),
    )?;
    table_out(&pp, &dir, "pp", a.svg)?;
    table_out(&qq, &dir, "qq", a.svg)?;
    table_out(&scatter_table(&series, Some(&fit))?, &dir, "data", a.svg)?;
    table_out(&trace_table(&fit)?, &dir, "trace", a.svg)?;
    table_out(&merge_curves("dependence functions", &curves)?, &dir, "depfn", a.svg)?;
    if a.fit.is_none() {
        std::fs::write(dir.join("fit.json"), fit_json(&fit)?)
            .map_err(|e| BevmError::Io(format!("{}: {e}", dir.display())))?;
    }
    let band = KS_95 / (series.len() as f64).sqrt();
    for (name, dev) in max_pp_deviation(&pp) {
        let verdict = if dev <= band { "within" } else { "outside" };
        say(stdout, &format!("pp {name}: max deviation {dev:.4} ({verdict} band {band:.4})"))?;
    }
    say(stdout, &format!("tables written to {}", dir.display()))
}

fn validate(a: ValidateArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let model = usage(a.model.model())?;
    check_grid(a.grid)?;
    let report = validate_dependence(&model, a.grid);
    say(stdout, &format!("model {}", report.label))?;
    for c in &report.checks {
        let status = if c.passed { "ok" } else { "FAIL" };
        say(stdout, &format!("{status:4} {:20} worst {:.3e}  {}", c.name, c.worst, c.detail))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(BevmError::Numeric {
            message: format!("{} check(s) failed", report.failures().count()),
            achieved: report.checks.iter().map(|c| c.worst).fold(0.0, f64::max),
        }
        .into())
    }
}

fn study_command(a: StudyArgs, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let mut settings = StudySettings::reference(a.seed);
    if !a.reference_defaults {
        if let Some(r) = a.reps {
            settings.n_reps = r;
        }
        if let Some(n) = a.n_times {
            settings.n_times = n;
        }
        if let Some(l) = a.lambda {
            check_lambda("lambda", l)?;
            settings.lambda = l;
        }
        if let Some(s) = a.s {
            settings.s = s;
        }
    }
    usage(settings.validate())?;
    let dir = a.out_dir.clone().unwrap_or_else(default_output_dir);
    ensure_dir(&dir)?;
    let report = run_study_pipeline(&settings, &dir, a.svg)?;
    for line in report.summary_lines() {
        say(stdout, &line)?;
    }
    say(stdout, &format!("tables written to {}", dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn simulate_flags_parse() {
        let cli = Cli::try_parse_from(args(&[
            "bevm", "simulate", "--c", "0.25", "--s", "2", "--n", "500", "--seed", "7", "--out", "a.csv",
        ]))
        .unwrap();
        match cli.command {
            Command::Simulate(a) => {
                assert_eq!((a.model.c, a.model.s, a.n, a.seed), (0.25, 2.0, 500, 7));
                assert!(a.model.model().is_ok());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn invalid_c_is_usage_error() {
        let cli = Cli::try_parse_from(args(&["bevm", "depfn", "--c", "0.7"])).unwrap();
        let mut sink = Vec::new();
        let err = execute(cli.command, &mut sink).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("c must be < 0.5"), "{err}");
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# settings\ns = 2\nc = 0.1\n").unwrap();
        let argv = splice_config(args(&["bevm", "depfn", "--config", cfg.to_str().unwrap(), "--s", "3"])).unwrap();
        let cli = Cli::try_parse_from(argv).unwrap();
        match cli.command {
            Command::Depfn(a) => assert_eq!((a.model.s, a.model.c), (3.0, 0.1)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "bogus = 1\n").unwrap();
        let err = splice_config(args(&["bevm", "depfn", "--config", cfg.to_str().unwrap()])).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.31000000000000005), "0.31");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1.0 / 33.0), "0.030303030303");
    }
}
