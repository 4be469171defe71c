//! Statistical helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use bevm::dependence::DependenceModel;
use bevm::measure::{v_model, ExpPair};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Asymptotic two-sided Kolmogorov critical value at level 0.01.
pub const KS_CRIT_01: f64 = 1.6276;

/// Kolmogorov-Smirnov distance between `sample` and the Exp(1) law.
pub fn ks_exp1(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn ks_passes_01(sample: &[f64]) -> bool {
    ks_exp1(sample) * (sample.len() as f64).sqrt() < KS_CRIT_01
}

/// Joint survival `exp(-V)` with the conventions `x = inf` or `y = inf`
/// giving zero mass.
fn survival(x: f64, y: f64, model: &DependenceModel) -> f64 {
    if x.is_infinite() || y.is_infinite() {
        return 0.0;
    }
    match (x > 0.0, y > 0.0) {
        (false, false) => 1.0,
        (true, false) => (-x).exp(),
        (false, true) => (-y).exp(),
        (true, true) => (-v_model(&ExpPair { x_e: x, y_e: y }, model)).exp(),
    }
}

/// Pearson chi-square test of `pairs` against `model` on a `k x k` grid of
/// rectangles with Exp(1) quantile edges. Cell probabilities come from
/// inclusion-exclusion of the joint survival. Cells with expected count
/// below 5 are pooled. Returns `(statistic, degrees of freedom, p-value)`.
pub fn chi_square_rectangles(pairs: &[ExpPair], model: &DependenceModel, k: usize) -> (f64, f64, f64) {
    let edges: Vec<f64> = (0..=k)
        .map(|i| match i {
            0 => 0.0,
            _ if i == k => f64::INFINITY,
            _ => -(1.0 - i as f64 / k as f64).ln(),
        })
        .collect();
    let cell = |v: f64| edges.partition_point(|&e| e <= v).saturating_sub(1).min(k - 1);
    let mut observed = vec![0.0; k * k];
    for p in pairs {
        observed[cell(p.x_e) * k + cell(p.y_e)] += 1.0;
    }
    let n = pairs.len() as f64;
    let mut expected = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let (x1, x2, y1, y2) = (edges[i], edges[i + 1], edges[j], edges[j + 1]);
            let prob = survival(x1, y1, model) - survival(x2, y1, model) - survival(x1, y2, model)
                + survival(x2, y2, model);
            expected[i * k + j] = n * prob.max(0.0);
        }
    }
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        if *e >= 5.0 {
            stat += (o - e).powi(2) / e;
            cells += 1;
        } else {
            pool_o += o;
            pool_e += e;
        }
    }
    if pool_e >= 5.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e;
        cells += 1;
    } else if pool_o > 0.0 && pool_e < 1e-9 {
        // mass observed where the model puts none
        return (f64::INFINITY, cells as f64, 0.0);
    }
    let df = (cells - 1) as f64;
    let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, df, p)
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
