//! End-to-end tests of the binary: exit codes, output files, wrapper
//! parity with direct library calls, and error diagnostics.

use restack_cli::csv_io::read_predictions;
use restack_core::redundancy::{project, variance_prune, RedundancyConfig};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_restack"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed with {:?}\nstdout: {}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth_pool(dir: &Path, n: usize, clusters: usize, per: usize, seed: u64) -> PathBuf {
    let csv = dir.join(format!("pool_{seed}.csv"));
    run_ok(&[
        "synth",
        "--out",
        csv.to_str().unwrap(),
        "--n-samples",
        &n.to_string(),
        "--clusters",
        &clusters.to_string(),
        "--models-per-cluster",
        &per.to_string(),
        "--seed",
        &seed.to_string(),
    ]);
    csv
}

#[test]
fn run_smoke_produces_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 300, 2, 3, 7);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "run",
        "--predictions",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--folds",
        "4",
        "--meta",
        "ridge,lasso",
    ]);
    for f in [
        "report.json",
        "report.txt",
        "selection_log.csv",
        "fold_traces.csv",
        "blend_weights.csv",
        "regularization_path.csv",
        "prediction_bins.csv",
        "timings.json",
    ] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let keys: Vec<&str> = report["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["key"].as_str().unwrap())
        .collect();
    assert!(keys.contains(&"best_single"));
    assert!(keys.contains(&"uniform_average"));
    assert!(keys.contains(&"hill_climb"));
    assert!(keys.contains(&"meta_ridge"));
    assert!(keys.contains(&"meta_lasso"));
    assert!(keys.contains(&"full_ensemble"));
    assert!(!keys.contains(&"meta_elasticnet"), "meta flag not respected");
    assert_eq!(report["config"]["folds"], 4);
    // effective tau_mse is resolved, not null
    assert!(report["config"]["tau_mse"].as_f64().unwrap() > 0.0);
}

#[test]
fn run_with_test_file_writes_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 240, 2, 2, 9);
    // reuse the training pool as a "test" file without its target column
    let train = std::fs::read_to_string(&csv).unwrap();
    let mut lines = train.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mut test_text = String::new();
    let keep: Vec<usize> =
        (0..header.len()).filter(|&i| header[i] != "target").collect();
    test_text.push_str(&keep.iter().map(|&i| header[i]).collect::<Vec<_>>().join(","));
    test_text.push('\n');
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        test_text.push_str(&keep.iter().map(|&i| cells[i]).collect::<Vec<_>>().join(","));
        test_text.push('\n');
    }
    let test_csv = dir.path().join("test.csv");
    std::fs::write(&test_csv, test_text).unwrap();

    let out_dir = dir.path().join("out");
    run_ok(&[
        "run",
        "--predictions",
        csv.to_str().unwrap(),
        "--test",
        test_csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--folds",
        "4",
        "--meta",
        "ridge",
    ]);
    let preds = std::fs::read_to_string(out_dir.join("test_predictions.csv")).unwrap();
    assert!(preds.starts_with("id,prediction\n"));
    assert_eq!(preds.lines().count(), 241);
}

#[test]
fn missing_target_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("no_target.csv");
    std::fs::write(&csv, "id,m1,m2\n0,1.0,2.0\n1,2.0,3.0\n2,3.0,4.0\n").unwrap();
    let out = bin()
        .args(["run", "--predictions", csv.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("target column required"), "stderr: {err}");
    assert_eq!(err.lines().count(), 1, "diagnostic must be a single line: {err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["run", "--nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_pool_is_a_clean_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty_pool.csv");
    std::fs::write(&csv, "id,target\n0,1.0\n1,2.0\n").unwrap();
    let out = bin()
        .args([
            "dedup",
            "--predictions",
            csv.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_stack_is_a_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dup.csv");
    let mut text = String::from("id,target,a,b\n");
    for i in 0..40 {
        let v = (i as f64 * 0.37).sin();
        text.push_str(&format!("{i},{v},{v},{v}\n"));
    }
    std::fs::write(&csv, text).unwrap();
    let out = bin()
        .args([
            "run",
            "--predictions",
            csv.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
            "--folds",
            "4",
            "--baselines",
            "ols_stack",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn invalid_config_key_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 120, 2, 2, 3);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "folds = 4\nmystery_knob = 1\n").unwrap();
    let out = bin()
        .args([
            "run",
            "--predictions",
            csv.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery_knob"));
}

#[test]
fn config_file_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 200, 2, 2, 5);
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "folds = 5\nmeta = [\"ridge\"]\nbootstrap_resamples = 120\n").unwrap();
    let out_dir = dir.path().join("out");
    run_ok(&[
        "run",
        "--predictions",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--folds",
        "4",
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["folds"], 4);
    assert_eq!(report["config"]["bootstrap_resamples"], 120);
    assert_eq!(report["config"]["meta_learners"], serde_json::json!(["ridge"]));
}

#[test]
fn dedup_wrapper_matches_direct_library_call() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 400, 3, 3, 11);
    let out_dir = dir.path().join("dedup_out");
    run_ok(&[
        "dedup",
        "--predictions",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--tau-corr",
        "0.95",
    ]);

    // same computation through the library
    let file = read_predictions(&csv).unwrap();
    let target = file.target.unwrap();
    let cfg = RedundancyConfig::new(0.95, 0.05 * target.variance(), 0.01).unwrap();
    let (pruned, _) = variance_prune(&file.pool, 0.01).unwrap();
    let expect = project(&pruned, &target, &cfg).unwrap();

    let log = std::fs::read_to_string(out_dir.join("dedup_log.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(lines.next().unwrap(), "removed_model,kept_alternative,rho,delta_rmse");
    let got: Vec<Vec<String>> =
        lines.map(|l| l.split(',').map(|s| s.to_string()).collect()).collect();
    assert_eq!(got.len(), expect.removals.len());
    for (row, removal) in got.iter().zip(&expect.removals) {
        assert_eq!(row[0], removal.removed);
        assert_eq!(row[1], removal.kept);
        assert_eq!(row[2].parse::<f64>().unwrap(), removal.rho);
        assert_eq!(row[3].parse::<f64>().unwrap(), removal.delta_rmse);
    }

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("dedup.json")).unwrap())
            .unwrap();
    let retained: Vec<&str> = json["result"]["retained_names"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let expect_names: Vec<&str> = expect.retained_names.iter().map(|s| s.as_str()).collect();
    assert_eq!(retained, expect_names);
}

#[test]
fn ablate_emits_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_pool(dir.path(), 300, 2, 3, 13);
    let out_dir = dir.path().join("abl");
    run_ok(&[
        "ablate",
        "--predictions",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--folds",
        "4",
        "--meta",
        "ridge,lasso",
    ]);
    let csv_text = std::fs::read_to_string(out_dir.join("ablation.csv")).unwrap();
    let lines: Vec<&str> = csv_text.lines().collect();
    assert_eq!(lines.len(), 7, "header plus six configuration rows");
    assert!(lines[1].starts_with("baseline_ridge_stack,"));
    assert!(lines[6].starts_with("meta_ensemble_blending,"));
}

#[test]
fn synth_rho_within_controls_measured_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tight.csv");
    run_ok(&[
        "synth",
        "--out",
        csv.to_str().unwrap(),
        "--n-samples",
        "2000",
        "--clusters",
        "2",
        "--models-per-cluster",
        "3",
        "--rho-within",
        "0.995",
        "--seed",
        "3",
    ]);
    let file = read_predictions(&csv).unwrap();
    for a in 0..3 {
        for b in (a + 1)..3 {
            let r = restack_core::metrics::pearson(file.pool.col(a), file.pool.col(b)).unwrap();
            assert!(r > 0.99, "within-cluster pearson {r}");
        }
    }
}
