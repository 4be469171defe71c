//! Time-indexed bivariate observations and their CSV form.
//!
//! The CSV schema is a header row naming `x`, `y` and optionally `t`, with
//! `#`-prefixed metadata lines allowed anywhere. Without a `t` column the
//! observations are taken as equally spaced on `[0, 1]`.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BevmError, Result};
use crate::margins::{exp_scale, TrendingMargin};
use crate::measure::ExpPair;

/// Scale on which the values of a series are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MarginScale {
    #[default]
    Original,
    Exponential,
    Frechet,
}

impl MarginScale {
    pub fn as_str(&self) -> &'static str {
        match self {
            MarginScale::Original => "original",
            MarginScale::Exponential => "exponential",
            MarginScale::Frechet => "frechet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "original" => Ok(MarginScale::Original),
            "exponential" => Ok(MarginScale::Exponential),
            "frechet" => Ok(MarginScale::Frechet),
            other => Err(BevmError::input(format!("unknown margin scale '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateSeries {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub scale: MarginScale,
}

/// `n` equally spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

impl BivariateSeries {
    pub fn new(t: Vec<f64>, x: Vec<f64>, y: Vec<f64>, scale: MarginScale) -> Result<Self> {
        if t.len() != x.len() || x.len() != y.len() {
            return Err(BevmError::input(format!(
                "column lengths differ: t {}, x {}, y {}",
                t.len(),
                x.len(),
                y.len()
            )));
        }
        if let Some(i) = (0..x.len()).find(|&i| !(t[i].is_finite() && x[i].is_finite() && y[i].is_finite())) {
            return Err(BevmError::input(format!("non-finite value in row {}", i + 1)));
        }
        Ok(Self { t, x, y, scale })
    }

    /// Series without explicit times.
    pub fn untimed(x: Vec<f64>, y: Vec<f64>, scale: MarginScale) -> Result<Self> {
        Self::new(unit_grid(x.len()), x, y, scale)
    }

    pub fn from_pairs(pairs: &[ExpPair]) -> Self {
        Self {
            t: unit_grid(pairs.len()),
            x: pairs.iter().map(|p| p.x_e).collect(),
            y: pairs.iter().map(|p| p.y_e).collect(),
            scale: MarginScale::Exponential,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// First row (1-based) with `x >= y`, if any.
    pub fn first_unordered(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.x[i] >= self.y[i]).map(|i| i + 1)
    }

    pub fn is_ordered(&self) -> bool {
        self.first_unordered().is_none()
    }

    /// Values as exponential-scale pairs; the series must be on the
    /// exponential or Fréchet scale.
    pub fn exp_pairs(&self) -> Result<Vec<ExpPair>> {
        let map: fn(f64) -> f64 = match self.scale {
            MarginScale::Exponential => |v| v,
            MarginScale::Frechet => |v| 1.0 / v,
            MarginScale::Original => {
                return Err(BevmError::input(
                    "series is on the original scale; transform it with fitted margins first",
                ))
            }
        };
        self.x
            .iter()
            .zip(&self.y)
            .map(|(&x, &y)| ExpPair::new(map(x), map(y)))
            .collect()
    }

    /// Maps original-scale data to exponential margins.
    pub fn to_exp_scale(&self, mx: &TrendingMargin, my: &TrendingMargin) -> Result<BivariateSeries> {
        if self.scale != MarginScale::Original {
            return Err(BevmError::input("series is not on the original scale"));
        }
        let mut x = Vec::with_capacity(self.len());
        let mut y = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            x.push(exp_scale(self.x[i], &mx.at(i, self.t[i])?)?);
            y.push(exp_scale(self.y[i], &my.at(i, self.t[i])?)?);
        }
        Self::new(self.t.clone(), x, y, MarginScale::Exponential)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# scale: {}", self.scale.as_str());
        out.push_str("t,x,y\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "{},{},{}", self.t[i], self.x[i], self.y[i]);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())
            .map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))
    }

    /// Parses CSV text. A `# scale: ...` line sets the scale; otherwise
    /// `default_scale` applies.
    pub fn from_csv_reader<R: Read>(mut reader: R, default_scale: MarginScale) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let mut scale = default_scale;
        for line in text.lines() {
            if let Some(rest) = line.trim_start().strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("scale:") {
                    scale = MarginScale::parse(v)?;
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| BevmError::input(format!("cannot read CSV header: {e}")))?
            .clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (ix, iy) = match (col("x"), col("y")) {
            (Some(ix), Some(iy)) => (ix, iy),
            _ => {
                return Err(BevmError::input(format!(
                    "CSV header must contain columns x and y, found [{}]",
                    headers.iter().collect::<Vec<_>>().join(",")
                )))
            }
        };
        let it = col("t");
        let (mut t, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| BevmError::input(format!("CSV row {}: {e}", row + 1)))?;
            let field = |i: usize, name: &str| -> Result<f64> {
                let raw = rec.get(i).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    BevmError::input(format!("row {}: cannot parse {name} = '{raw}'", row + 1))
                })
            };
            x.push(field(ix, "x")?);
            y.push(field(iy, "y")?);
            if let Some(i) = it {
                t.push(field(i, "t")?);
            }
        }
        if x.is_empty() {
            return Err(BevmError::input("CSV contains no data rows"));
        }
        if it.is_none() {
            t = unit_grid(x.len());
        }
        Self::new(t, x, y, scale)
    }

    pub fn read_csv(path: &Path, default_scale: MarginScale) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| BevmError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, default_scale)
    }
}
