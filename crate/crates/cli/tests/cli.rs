use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smote-reg")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn error_category(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["category"].as_str().unwrap().to_string()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("run_summary.json")).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_data_writes_28_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    ok(&["synth-data", "--n", "28", "--seed", "3", "--out", p(&out)]);
    let text = std::fs::read_to_string(out.join("benchmark.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "core_edge_nm,core_amount_nmol,s_amount_mg,length_nm,width_nm,aspect_ratio"
    );
    assert_eq!(lines.count(), 28);

    let again = dir.path().join("b");
    ok(&["synth-data", "--n", "28", "--seed", "3", "--out", p(&again)]);
    assert_eq!(std::fs::read(out.join("benchmark.csv")).unwrap(), std::fs::read(again.join("benchmark.csv")).unwrap());
}

#[test]
fn zero_rows_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["synth-data", "--n", "0", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_category(&out), "usage");
}

#[test]
fn augment_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"smote": {"n_percent": 100}}"#).unwrap();
    ok(&["augment", "--config", p(&cfg), "--n", "3", "--out", p(dir.path())]);
    let s = summary(dir.path());
    assert_eq!(s["counts"]["augment"]["total"], 9);
    assert_eq!(s["counts"]["augment"]["subsets"], 3);
    let text = std::fs::read_to_string(dir.path().join("augmented.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with("parent_index,neighbor_index,lambda"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn too_many_neighbors_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"smote": {"k": 2, "minority_size": 2}}"#).unwrap();
    let out = run(&["augment", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_category(&out), "config");
}

#[test]
fn too_many_folds_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"augment": false}"#).unwrap();
    let out = run(&["cv", "--config", p(&cfg), "--n", "5", "--k-folds", "6", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_category(&out), "usage");
}

#[test]
fn cv_report_is_finite_and_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec!["cv", "--n", "8", "--k-folds", "3", "--epochs", "5", "--out"]
            .into_iter()
            .map(String::from)
            .chain([p(out).to_string()])
            .collect::<Vec<_>>()
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    ok(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    let report: Value = serde_json::from_slice(&std::fs::read(a.join("cv_report.json")).unwrap()).unwrap();
    for fold in report["cross_validation"]["per_fold"].as_array().unwrap() {
        let mae = fold["mae"].as_f64().unwrap();
        let mse = fold["mse"].as_f64().unwrap();
        assert!(mae.is_finite() && mse.is_finite() && fold["r2"].as_f64().unwrap().is_finite());
        assert!(mae * mae <= mse * (1.0 + 1e-12));
    }
    assert_eq!(std::fs::read(a.join("cv_report.json")).unwrap(), std::fs::read(b.join("cv_report.json")).unwrap());
    assert_eq!(std::fs::read(a.join("cv_table.csv")).unwrap(), std::fs::read(b.join("cv_table.csv")).unwrap());
    let table = std::fs::read_to_string(a.join("cv_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn train_predict_explain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth-data", "--n", "28", "--seed", "1", "--out", p(&d.join("data"))]);
    ok(&["synth-data", "--n", "3", "--seed", "2", "--out", p(&d.join("holdout"))]);
    let data = d.join("data/benchmark.csv");
    ok(&["train", "--input", p(&data), "--epochs", "5", "--out", p(&d.join("model"))]);
    let model = d.join("model/model.txt");

    ok(&["predict", "--model", p(&model), "--input", p(&d.join("holdout/benchmark.csv")), "--out", p(&d.join("pred"))]);
    let preds = std::fs::read_to_string(d.join("pred/predictions.csv")).unwrap();
    assert_eq!(preds.lines().next().unwrap(), "row,actual,predicted");
    assert_eq!(preds.lines().count(), 4);

    ok(&["explain", "--model", p(&model), "--input", p(&data), "--out", p(&d.join("explain"))]);
    let weights = std::fs::read_to_string(d.join("explain/weight_matrix.csv")).unwrap();
    assert_eq!(weights.lines().count(), 29);
    assert_eq!(weights.lines().nth(1).unwrap().split(',').count(), 7);

    // a 2-feature file against the 3-feature model
    let narrow = d.join("narrow.csv");
    std::fs::write(&narrow, "core_edge_nm,core_amount_nmol,length_nm\n500,20,80\n").unwrap();
    let out = run(&["predict", "--model", p(&model), "--input", p(&narrow), "--out", p(&d.join("x"))]);
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(error_category(&out), "schema");

    let out = run(&["predict", "--model", p(&d.join("missing.txt")), "--input", p(&data), "--out", p(&d.join("x"))]);
    assert_eq!(error_category(&out), "io");
}

#[test]
fn summary_records_seeds_and_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["synth-data", "--n", "4", "--seed", "9", "--out", p(dir.path())]);
    let s = summary(dir.path());
    assert_eq!(s["command"], "synth-data");
    assert_eq!(s["seeds"]["global"], 9);
    assert_eq!(s["config"]["seed"], 9);
    assert_eq!(s["config"]["smote"]["seed"], s["seeds"]["smote"]);
    assert_eq!(s["outputs"][0], "benchmark.csv");
}

#[test]
fn custom_target_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    std::fs::write(&input, "a,b,yield\n1,2,3\n2,1,4\n3,3,6\n4,0,5\n").unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"features": ["a", "b"], "target": "yield", "smote": {"n_percent": 100}}"#).unwrap();
    ok(&["augment", "--config", p(&cfg), "--input", p(&input), "--out", p(dir.path())]);
    assert_eq!(summary(dir.path())["counts"]["augment"]["total"], 4 + 6 * 2);
}
