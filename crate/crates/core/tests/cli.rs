use std::path::Path;
use std::process::{Command, Output};

use bevm::diagnostics::CurveTable;

fn bevm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bevm"))
        .args(args)
        .env_remove("BEVM_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn depfn_prints_the_closed_form_curve() {
    let out = bevm(&["depfn", "--c", "0.25", "--s", "2", "--grid", "101"]);
    assert!(out.status.success());
    let table = CurveTable::from_csv_str(&stdout(&out)).unwrap();
    let w = table.column("omega").unwrap();
    let i = w.iter().position(|&v| v == 0.5).unwrap();
    // A(1/2) = V(1, 1) / 2 = (sqrt(2) / 2 + 1/4) / 1.5 at c = 0.25, s = 2
    let expect = (0.5 * 2f64.sqrt() + 0.25) / 1.5;
    assert!((table.rows[i][1] - expect).abs() < 1e-12, "{}", table.rows[i][1]);
}

#[test]
fn invalid_boundary_is_a_usage_error() {
    let out = bevm(&["depfn", "--c", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c must be < 0.5"));
}

#[test]
fn unknown_command_and_missing_file_exit_codes() {
    assert_eq!(bevm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bevm(&["fit", "--input", "/nonexistent/data.csv"]).status.code(), Some(1));
}

#[test]
fn flags_win_over_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "s = 2\nc = 0.1\n").unwrap();
    let out = bevm(&["depfn", "--config", path(&cfg), "--s", "3", "--grid", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let from_flag = CurveTable::from_csv_str(&stdout(&out)).unwrap();
    let direct = CurveTable::from_csv_str(&stdout(&bevm(&["depfn", "--c", "0.1", "--s", "3", "--grid", "3"]))).unwrap();
    assert_eq!(from_flag.rows, direct.rows);
    let other = CurveTable::from_csv_str(&stdout(&bevm(&["depfn", "--c", "0.1", "--s", "2", "--grid", "3"]))).unwrap();
    assert_ne!(from_flag.rows, other.rows);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = bevm(&["depfn", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_c_reports_minimum_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pairs.csv");
    std::fs::write(&csv, "# scale: exponential\nx,y\n1,1\n0.69,0.31\n0.2,0.8\n").unwrap();
    let out = bevm(&["estimate-c", "--input", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim(), "0.31");
}

#[test]
fn simulate_is_reproducible_and_ordered() {
    let args = ["simulate", "--n", "300", "--seed", "5", "--s", "1.5", "--c", "0.2"];
    let (a, b) = (bevm(&args), bevm(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let series = bevm::series::BivariateSeries::from_csv_reader(&a.stdout[..], bevm::series::MarginScale::Original)
        .unwrap();
    for p in series.exp_pairs().unwrap() {
        assert!(p.omega() >= 0.2);
    }
    assert_ne!(a.stdout, bevm(&["simulate", "--n", "300", "--seed", "6", "--s", "1.5", "--c", "0.2"]).stdout);
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_bevm"))
        .args(["depfn", "--grid", "11"])
        .env("BEVM_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("depfn.csv")).unwrap();
    assert_eq!(CurveTable::from_csv_str(&text).unwrap().rows.len(), 11);
}

#[test]
fn fit_and_diagnose_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let fit = dir.path().join("fit.json");
    let diag = dir.path().join("diag");
    let sim = bevm(&["simulate", "--scale", "original", "--n", "120", "--seed", "3", "--c", "0.0303", "--out", path(&data)]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let out = bevm(&["fit", "--input", path(&data), "--out", path(&fit)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result: bevm::estimation::FitResult = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    assert!(result.s >= 1.0 && result.c_hat <= result.c_hat_pickands);
    let out = bevm(&["diagnose", "--input", path(&data), "--fit", path(&fit), "--out-dir", path(&diag), "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["pp", "qq", "data", "trace", "depfn"] {
        let text = std::fs::read_to_string(diag.join(format!("{name}.csv"))).unwrap();
        let table = CurveTable::from_csv_str(&text).unwrap();
        assert!(!table.rows.is_empty(), "{name}");
        assert!(diag.join(format!("{name}.svg")).exists(), "{name}");
    }
    let est = bevm(&["estimate-c", "--input", path(&data), "--fit", path(&fit)]);
    let c: f64 = stdout(&est).trim().parse().unwrap();
    // printed with 12 decimals
    assert!((c - result.c_hat_pickands).abs() < 1e-12, "{c}");
}

#[test]
fn small_study_is_deterministic() {
    let run = |dir: &Path| {
        let out = bevm(&["study", "--seed", "2", "--reps", "3", "--n-times", "80", "--out-dir", path(dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        stdout(&out)
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (sa, sb) = (run(a.path()), run(b.path()));
    let line = sa.lines().find(|l| l.starts_with("parametric c (true margins)")).unwrap();
    let c: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((c - 1.0 / 33.0).abs() < 1e-4, "{c}");
    assert_eq!(sa.replace(path(a.path()), ""), sb.replace(path(b.path()), ""));
    for name in ["estimates.csv", "replicate_means.csv", "depfn.csv", "pp.csv", "qq.csv", "summary.json"] {
        let (x, y) = (std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn reference_defaults_conflict_with_overrides() {
    assert_eq!(bevm(&["study", "--paper-defaults", "--reps", "3"]).status.code(), Some(2));
}
