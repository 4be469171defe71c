mod common;

use bevm::dependence::{
    AsymLogisticParams, DependenceModel, IntervalRestrictedParams, RestrictedLogisticParams, UpperRestrictedParams,
};
use bevm::estimation::{estimate_c_hat, omega_grid, pickands_curve, PickandsVariant};
use bevm::margins::{exp_scale_inverse, gevm_survival, GevmParams};
use bevm::simulate::{replicate_rng, run_study, sample_pairs, StudyConfig};
use rand::Rng;
use rand_distr::Exp1;

fn restricted(c: f64, s: f64) -> DependenceModel {
    DependenceModel::Restricted(RestrictedLogisticParams::new(c, s).unwrap())
}

fn families() -> Vec<DependenceModel> {
    vec![
        DependenceModel::Asym(AsymLogisticParams::new(0.4, 0.7, 3.0).unwrap()),
        restricted(0.25, 2.0),
        restricted(0.25, 1.0),
        DependenceModel::Upper(UpperRestrictedParams::new(0.75, 2.0).unwrap()),
        DependenceModel::Interval(IntervalRestrictedParams::new(0.25, 0.75, 2.0).unwrap()),
    ]
}

#[test]
fn inverse_transform_draws_match_survival() {
    let mut rng = replicate_rng(2024, 0);
    for p in [
        GevmParams::new(150.0, 2.0, 0.2).unwrap(),
        GevmParams::new(0.0, 1.0, 0.0).unwrap(),
        GevmParams::new(-3.0, 1.5, -0.3).unwrap(),
    ] {
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| exp_scale_inverse(rng.sample::<f64, _>(Exp1).max(1e-300), &p).unwrap())
            .collect();
        for u in [-2.0, -0.5, 0.0, 1.0, 2.5] {
            let z = p.mu() + u * p.sigma();
            let expect = gevm_survival(z, &p);
            let emp = draws.iter().filter(|&&d| d > z).count() as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt().max(1e-9);
            assert!((emp - expect).abs() <= 3.0 * se, "{p:?} z={z}: {emp} vs {expect}");
        }
    }
}

#[test]
fn sampler_margins_are_standard_exponential() {
    for (i, m) in families().iter().enumerate() {
        let mut rng = replicate_rng(77, i as u64);
        let pairs = sample_pairs(m, 2000, &mut rng).unwrap();
        let xs: Vec<f64> = pairs.iter().map(|p| p.x_e).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.y_e).collect();
        assert!(common::ks_passes_01(&xs), "{}: x KS {}", m.label(), common::ks_exp1(&xs));
        assert!(common::ks_passes_01(&ys), "{}: y KS {}", m.label(), common::ks_exp1(&ys));
    }
}

#[test]
fn sampler_matches_joint_law() {
    for (i, m) in families().iter().enumerate() {
        let mut rng = replicate_rng(78, i as u64);
        let pairs = sample_pairs(m, 5000, &mut rng).unwrap();
        let (stat, df, p) = common::chi_square_rectangles(&pairs, m, 6);
        assert!(p > 0.001, "{}: chi2 {stat} on {df} df, p = {p}", m.label());
    }
}

#[test]
fn modified_pickands_is_consistent() {
    let m = restricted(0.25, 2.0);
    let mut rng = replicate_rng(5000, 0);
    let pairs = sample_pairs(&m, 5000, &mut rng).unwrap();
    let grid = omega_grid(201);
    let est = pickands_curve(&pairs, &grid, PickandsVariant::Modified).unwrap();
    let sup = grid.iter().zip(&est.values).map(|(w, a)| (a - m.a(*w)).abs()).fold(0.0, f64::max);
    assert!(sup <= 0.05, "sup distance {sup}");
}

#[test]
fn boundary_estimate_never_undershoots() {
    let m = restricted(0.25, 2.0);
    for r in 0..200 {
        let mut rng = replicate_rng(31, r);
        let c_hat = estimate_c_hat(&sample_pairs(&m, 500, &mut rng).unwrap()).unwrap();
        assert!(c_hat >= 0.25, "replicate {r}: {c_hat}");
    }
}

#[test]
fn boundary_estimate_shrinks_with_sample_size() {
    let m = restricted(0.25, 2.0);
    let medians: Vec<f64> = [50usize, 5000]
        .iter()
        .map(|&n| {
            let est: Vec<f64> = (0..40)
                .map(|r| {
                    let mut rng = replicate_rng(n as u64, r);
                    estimate_c_hat(&sample_pairs(&m, n, &mut rng).unwrap()).unwrap()
                })
                .collect();
            common::median(&est)
        })
        .collect();
    assert!(medians[1] < medians[0], "{medians:?}");
}

#[test]
fn study_means_track_location_trend() {
    let cfg = StudyConfig::reference_design(12).unwrap();
    let out = run_study(&cfg).unwrap();
    let n_times = cfg.times.len();
    // compare pooled blocks of times so the 3-SE rule is applied to few tests
    let blocks = 10;
    let per = n_times / blocks;
    for (margin, pick) in [(&cfg.margin_x, 0usize), (&cfg.margin_y, 1)] {
        for b in 0..blocks {
            let mut devs = Vec::new();
            for i in b * per..(b + 1) * per {
                let mean = margin.at(i, cfg.times[i]).unwrap().mean().unwrap();
                for s in &out.series {
                    devs.push(if pick == 0 { s.x[i] } else { s.y[i] } - mean);
                }
            }
            let n = devs.len() as f64;
            let avg = devs.iter().sum::<f64>() / n;
            let sd = (devs.iter().map(|d| (d - avg).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            assert!(avg.abs() <= 3.0 * sd / n.sqrt(), "margin {pick} block {b}: {avg} (sd {sd})");
        }
    }
}
