//! Plot-ready tables: dependence curves, fit traces, data-with-trend
//! scatter tables and probability/quantile plots.
//!
//! Every table is written as CSV preceded by `# key: value` metadata lines
//! (the first always being `# label: ...`), and can be rendered as a bare
//! SVG with one polyline per value column.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use statrs::distribution::{Beta, ContinuousCDF};

use crate::dependence::DependenceModel;
use crate::error::{BevmError, Result};
use crate::estimation::{fitted_exp_pairs, pickands_curve, FitResult, PickandsVariant};
use crate::measure::ExpPair;
use crate::series::BivariateSeries;
use crate::simulate::StudySummary;

/// Kolmogorov 95% critical value; the band half-width is this over `sqrt(n)`.
pub const KS_95: f64 = 1.36;

/// Fraction at which the structure diagnostic pools the two margins.
pub const STRUCTURE_OMEGA: f64 = 0.5;

/// A labelled numeric table whose first column is the abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub label: String,
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn new(label: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            label: label.into(),
            meta: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Metadata keys may not contain `:` or line breaks; values may not
    /// contain line breaks.
    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let clean = |s: &str| s.replace(['\n', '\r'], " ");
        self.meta
            .insert(clean(key).replace(':', "_").trim().to_string(), clean(&value.to_string()).trim().to_string());
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(BevmError::input(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// A table keyed by `omega` must have that column ascending in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if self.columns.first().map(String::as_str) == Some("omega") {
            let w = self.column("omega").unwrap_or_default();
            if w.iter().any(|v| !(0.0..=1.0).contains(v)) || w.windows(2).any(|p| !(p[1] >= p[0])) {
                return Err(BevmError::input(format!(
                    "table '{}': omega column must be ascending within [0, 1]",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# label: {}", self.label.replace(['\n', '\r'], " "));
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        // writing to a Vec cannot fail
        let _ = w.write_record(&self.columns);
        for row in &self.rows {
            let _ = w.write_record(row.iter().map(|v| v.to_string()));
        }
        let body = w.into_inner().unwrap_or_default();
        out.push_str(&String::from_utf8_lossy(&body));
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut label = None;
        let mut meta = BTreeMap::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    let (k, v) = (k.trim().to_string(), v.trim().to_string());
                    if k == "label" && label.is_none() {
                        label = Some(v);
                    } else {
                        meta.insert(k, v);
                    }
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| BevmError::input(format!("cannot read table header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() || columns.iter().all(String::is_empty) {
            return Err(BevmError::input("table has no header row"));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| BevmError::input(format!("table row {}: {e}", i + 1)))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| BevmError::input(format!("table row {}: cannot parse '{f}'", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let table = Self {
            label: label.unwrap_or_default(),
            meta,
            columns,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text)
    }

    /// Minimal SVG: 800x600 viewBox, one polyline per value column against
    /// the first column. Non-finite values break the line.
    pub fn to_svg(&self) -> String {
        const W: f64 = 800.0;
        const H: f64 = 600.0;
        const PAD: f64 = 60.0;
        const PALETTE: [&str; 8] = [
            "#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
        ];
        let finite = |v: &f64| v.is_finite();
        let xs: Vec<f64> = self.rows.iter().map(|r| r[0]).filter(finite).collect();
        let ys: Vec<f64> = self.rows.iter().flat_map(|r| r[1..].iter().copied()).filter(finite).collect();
        let range = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            match (lo.is_finite(), hi > lo) {
                (true, true) => (lo, hi),
                (true, false) => (lo - 0.5, lo + 0.5),
                _ => (0.0, 1.0),
            }
        };
        let (x0, x1) = range(&xs);
        let (y0, y1) = range(&ys);
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(
            out,
            r#"<text x="400" y="30" text-anchor="middle" font-size="16">{}</text>"#,
            xml_escape(&self.label)
        );
        for (x, anchor, text) in [(PAD, "start", x0), (W - PAD, "end", x1)] {
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{}" text-anchor="{anchor}" font-size="12">{}</text>"#,
                H - PAD + 18.0,
                fmt_tick(text)
            );
        }
        for (y, text) in [(H - PAD, y0), (PAD, y1)] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{y}" text-anchor="end" font-size="12">{}</text>"#,
                PAD - 6.0,
                fmt_tick(text)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="400" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
            H - 15.0,
            xml_escape(&self.columns[0])
        );
        for (j, name) in self.columns.iter().enumerate().skip(1) {
            let colour = PALETTE[(j - 1) % PALETTE.len()];
            let mut segments: Vec<Vec<String>> = vec![vec![]];
            for row in &self.rows {
                if row[0].is_finite() && row[j].is_finite() {
                    segments.last_mut().unwrap().push(format!("{:.2},{:.2}", px(row[0]), py(row[j])));
                } else if !segments.last().unwrap().is_empty() {
                    segments.push(vec![]);
                }
            }
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                    seg.join(" ")
                );
            }
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="12" fill="{colour}">{}</text>"#,
                W - PAD - 150.0,
                PAD + 16.0 * j as f64,
                xml_escape(name)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn write_svg(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_svg()).map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))
    }
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A named exponential-scale sample to be summarised by the modified
/// Pickands estimator.
#[derive(Debug, Clone)]
pub struct EstimatorInput {
    pub label: String,
    pub sample: Vec<ExpPair>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|w| !(0.0..=1.0).contains(w)) || grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(BevmError::domain("grid must be non-empty, strictly ascending and within [0, 1]"));
    }
    Ok(())
}

/// One `(omega, A)` table per model and per estimator sample, followed by
/// the lower bound `max(w, 1 - w)`.
pub fn depfn_curves(
    models: &[DependenceModel],
    estimators: &[EstimatorInput],
    grid: &[f64],
) -> Result<Vec<CurveTable>> {
    check_grid(grid)?;
    let mut tables = Vec::with_capacity(models.len() + estimators.len() + 1);
    for m in models {
        let mut t = CurveTable::new(m.label(), &["omega", "A"]).with_meta("kind", "parametric");
        for &w in grid {
            t.push(vec![w, m.a(w)])?;
        }
        tables.push(t);
    }
    for e in estimators {
        let curve = pickands_curve(&e.sample, grid, PickandsVariant::Modified)?;
        let mut t = CurveTable::new(e.label.clone(), &["omega", "A"])
            .with_meta("kind", "estimator")
            .with_meta("variant", PickandsVariant::Modified.as_str())
            .with_meta("n", e.sample.len());
        for (w, a) in curve.omegas.iter().zip(&curve.values) {
            t.push(vec![*w, *a])?;
        }
        tables.push(t);
    }
    let mut lb = CurveTable::new("lower_bound", &["omega", "A"]).with_meta("kind", "bound");
    for &w in grid {
        lb.push(vec![w, w.max(1.0 - w)])?;
    }
    tables.push(lb);
    Ok(tables)
}

/// Joins tables sharing the same abscissa into one wide table whose value
/// columns are named after the source labels.
pub fn merge_curves(label: &str, tables: &[CurveTable]) -> Result<CurveTable> {
    let first = tables.first().ok_or_else(|| BevmError::input("no tables to merge"))?;
    let x = first.columns[0].clone();
    let xs: Vec<f64> = first.rows.iter().map(|r| r[0]).collect();
    let mut cols = vec![x.clone()];
    for t in tables {
        if t.columns[0] != x || t.rows.len() != xs.len() || t.rows.iter().zip(&xs).any(|(r, v)| r[0] != *v) {
            return Err(BevmError::input(format!("table '{}' has a different abscissa", t.label)));
        }
        for c in &t.columns[1..] {
            cols.push(if t.columns.len() == 2 { t.label.clone() } else { format!("{}:{c}", t.label) });
        }
    }
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut out = CurveTable::new(label, &names);
    for (i, &xv) in xs.iter().enumerate() {
        let mut row = vec![xv];
        for t in tables {
            row.extend_from_slice(&t.rows[i][1..]);
        }
        out.push(row)?;
    }
    Ok(out)
}

/// Plotting positions `i / (n + 1)`.
pub fn plotting_positions(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n as f64 + 1.0)).collect()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Probability and quantile plots for exponential-scale pairs under a model
/// with dependence value `a_half = A(1/2)`.
///
/// Columns `x` and `y` compare each margin with Exp(1). Column `structure`
/// uses `T = min(X/(1-w0), Y/w0)` at `w0 = 1/2`, which is Exp(A(w0)) under
/// the model; it is rescaled by `A(w0)` so all three share the Exp(1)
/// reference. The quantile table also carries a pointwise envelope.
pub fn pp_qq_from_pairs(pairs: &[ExpPair], a_half: f64) -> Result<(CurveTable, CurveTable)> {
    if pairs.is_empty() {
        return Err(BevmError::input("empty sample"));
    }
    if !(a_half > 0.0) {
        return Err(BevmError::param(format!("A(1/2) must be positive, got {a_half}")));
    }
    let n = pairs.len();
    let w0 = STRUCTURE_OMEGA;
    let xs = sorted(pairs.iter().map(|p| p.x_e).collect());
    let ys = sorted(pairs.iter().map(|p| p.y_e).collect());
    let ts = sorted(pairs.iter().map(|p| a_half * (p.x_e / (1.0 - w0)).min(p.y_e / w0)).collect());
    let pos = plotting_positions(n);
    let cdf = |e: f64| -(-e).exp_m1();
    let band = KS_95 / (n as f64).sqrt();

    let mut pp = CurveTable::new("pp", &["plotting_position", "x", "y", "structure"])
        .with_meta("n", n)
        .with_meta("ks_band", band)
        .with_meta("structure_omega", w0)
        .with_meta("a_half", a_half);
    let mut qq = CurveTable::new("qq", &["exp_quantile", "x", "y", "structure", "band_lower", "band_upper"])
        .with_meta("n", n)
        .with_meta("structure_omega", w0)
        .with_meta("a_half", a_half)
        .with_meta("band_level", ENVELOPE_LEVEL);
    for i in 0..n {
        let (lo, hi) = order_statistic_envelope(i + 1, n)?;
        pp.push(vec![pos[i], cdf(xs[i]), cdf(ys[i]), cdf(ts[i])])?;
        qq.push(vec![-(-pos[i]).ln_1p(), xs[i], ys[i], ts[i], lo, hi])?;
    }
    for (name, dev) in max_pp_deviation(&pp) {
        pp.set_meta(&format!("max_deviation_{name}"), dev);
    }
    Ok((pp, qq))
}

/// Coverage of the pointwise quantile-plot envelope.
pub const ENVELOPE_LEVEL: f64 = 0.95;

/// Pointwise envelope for the `i`-th of `n` ordered Exp(1) values: the
/// uniform order statistic is Beta(i, n + 1 - i), mapped through the Exp(1)
/// quantile function.
pub fn order_statistic_envelope(i: usize, n: usize) -> Result<(f64, f64)> {
    let beta = Beta::new(i as f64, (n + 1 - i) as f64)
        .map_err(|e| BevmError::param(format!("order statistic {i} of {n}: {e}")))?;
    let tail = 0.5 * (1.0 - ENVELOPE_LEVEL);
    let q = |p: f64| -(-beta.inverse_cdf(p)).ln_1p();
    Ok((q(tail), q(1.0 - tail)))
}

/// Probability and quantile plots of `series` after mapping it to
/// exponential margins with the fitted trends.
pub fn pp_qq_tables(series: &BivariateSeries, fit: &FitResult) -> Result<(CurveTable, CurveTable)> {
    if fit.g_x.len() != series.len() || fit.g_y.len() != series.len() {
        return Err(BevmError::input(format!(
            "fitted trends have {} and {} points but the series has {}",
            fit.g_x.len(),
            fit.g_y.len(),
            series.len()
        )));
    }
    let pairs = fitted_exp_pairs(series, fit)?;
    let model = fit.model()?;
    pp_qq_from_pairs(&pairs, model.a(STRUCTURE_OMEGA))
}

/// Largest `|model probability - plotting position|` per value column.
pub fn max_pp_deviation(pp: &CurveTable) -> Vec<(String, f64)> {
    pp.columns
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, name)| {
            let dev = pp.rows.iter().map(|r| (r[j] - r[0]).abs()).fold(0.0, f64::max);
            (name.clone(), dev)
        })
        .collect()
}

/// Data with the fitted location trends, for scatter-plus-trend plots.
pub fn scatter_table(series: &BivariateSeries, fit: Option<&FitResult>) -> Result<CurveTable> {
    let mut cols = vec!["t", "x", "y"];
    if fit.is_some() {
        cols.extend(["g_x", "g_y"]);
    }
    let mut t = CurveTable::new("data", &cols).with_meta("scale", series.scale.as_str());
    if let Some(f) = fit {
        if f.g_x.len() != series.len() || f.g_y.len() != series.len() {
            return Err(BevmError::input("fitted trends do not match the series length"));
        }
    }
    for i in 0..series.len() {
        let mut row = vec![series.t[i], series.x[i], series.y[i]];
        if let Some(f) = fit {
            row.extend([f.g_x[i], f.g_y[i]]);
        }
        t.push(row)?;
    }
    Ok(t)
}

/// Parameter path over the outer iterations of a fit.
pub fn trace_table(fit: &FitResult) -> Result<CurveTable> {
    let mut t = CurveTable::new(
        "trace",
        &["iteration", "s", "sigma_x", "sigma_y", "xi", "c", "penalized_loglik"],
    )
    .with_meta("lambda_x", fit.lambda_x)
    .with_meta("lambda_y", fit.lambda_y)
    .with_meta("converged", fit.converged);
    for r in &fit.trace {
        t.push(vec![r.iteration as f64, r.s, r.sigma_x, r.sigma_y, r.xi, r.c, r.penalized_loglik])?;
    }
    Ok(t)
}

/// Across-replicate mean trajectories of a simulation study.
pub fn study_means_table(summary: &StudySummary) -> Result<CurveTable> {
    let mut t = CurveTable::new("replicate_means", &["t", "mean_x", "mean_y"]);
    for i in 0..summary.times.len() {
        t.push(vec![summary.times[i], summary.mean_x[i], summary.mean_y[i]])?;
    }
    Ok(t)
}

/// One row per fitted replicate with the scalar estimates and both
/// boundary estimates.
pub fn parameter_table(fits: &[FitResult]) -> Result<CurveTable> {
    let mut t = CurveTable::new(
        "estimates",
        &["replicate", "s", "sigma_x", "sigma_y", "xi", "c_hat", "c_hat_pickands", "converged"],
    );
    for (i, f) in fits.iter().enumerate() {
        t.push(vec![
            i as f64,
            f.s,
            f.sigma_x,
            f.sigma_y,
            f.xi,
            f.c_hat,
            f.c_hat_pickands,
            if f.converged { 1.0 } else { 0.0 },
        ])?;
    }
    Ok(t)
}
