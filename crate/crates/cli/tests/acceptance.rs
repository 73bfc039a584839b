//! Acceptance suite. Runs without the libtest harness so criteria execute one
//! after another (runtime limits are measured without competing work) and the
//! PASS/FAIL lines are always printed. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;
use smote_reg::dataset::{synth_benchmark, NanorodTarget, Origin};
use smote_reg::eval::compute_metrics;
use smote_reg::explain::{explain, FnPredictor, LimeConfig};
use smote_reg::model::{check_gradients, init_params, DEFAULT_LAYER_SIZES};
use smote_reg::oversample::{knn, smote_reg, SmoteConfig};
use smote_reg::seed;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn smote_reg_cmd(args: &[&str]) -> Result<Duration, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_smote-reg"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(elapsed)
}

fn read_json(path: &Path) -> Result<Value, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_slice(&bytes).map_err(|e| e.to_string())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sample_count(dir: &Path) -> Outcome {
    let out = dir.join("count");
    let elapsed = smote_reg_cmd(&["augment", "--n", "28", "--out", p(&out)])?;
    let counts = &read_json(&out.join("run_summary.json"))?["counts"]["augment"];
    ensure!(counts["subsets"] == 378, "subsets = {}", counts["subsets"]);
    ensure!(counts["synthetics_before_dedup"] == 378 * 2 * 12, "synthetics = {}", counts["synthetics_before_dedup"]);
    ensure!(counts["total"] == 9100, "total = {}", counts["total"]);
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("total 9100 in {elapsed:.2?}"))
}

fn interpolation_invariant() -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    for (n, s) in [(28, 1), (30, 2)] {
        let data = synth_benchmark(n, s, NanorodTarget::Length).map_err(|e| e.to_string())?;
        let aug = smote_reg(&data, &SmoteConfig { seed: s, ..Default::default() }).map_err(|e| e.to_string())?;
        for syn in aug.dataset.samples().iter().filter(|x| x.origin == Origin::Synthetic) {
            let prov = syn.provenance.as_ref().unwrap();
            let (a, b) = (&data.samples()[prov.parent_index], &data.samples()[prov.neighbor_index]);
            let l = prov.lambda;
            let mut joint: Vec<(f64, f64, f64)> = a
                .features
                .iter()
                .zip(&b.features)
                .zip(&syn.features)
                .map(|((&u, &v), &x)| (u, v, x))
                .collect();
            joint.push((a.target, b.target, syn.target));
            let bad = joint.iter().any(|&(u, v, x)| {
                (x - ((1.0 - l) * u + l * v)).abs() > 1e-12 * u.abs().max(v.abs()).max(1.0) || x < u.min(v) || x > u.max(v)
            });
            violations += bad as usize;
            checked += 1;
        }
    }
    ensure!(checked >= 10_000, "only {checked} synthetics");
    ensure!(violations == 0, "{violations} violations in {checked}");
    Ok(format!("{checked} synthetics, 0 violations"))
}

fn knn_oracle() -> Outcome {
    let mut rng = seed::rng(2024);
    let continuous: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let lattice: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..3).map(|_| rng.random_range(0..3) as f64).collect())
        .collect();
    let mut queries = 0;
    for points in [&continuous, &lattice] {
        for k in [1, 3, 5] {
            for q in 0..points.len() {
                let mut all: Vec<(f64, usize)> = (0..points.len())
                    .filter(|&i| i != q)
                    .map(|i| {
                        let d: f64 = (0..3).map(|j| (points[i][j] - points[q][j]).powi(2)).sum();
                        (d, i)
                    })
                    .collect();
                all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                let expected: Vec<usize> = all.iter().take(k).map(|x| x.1).collect();
                let got = knn(points, q, k).map_err(|e| e.to_string())?;
                ensure!(got == expected, "query {q}, k {k}: {got:?} vs {expected:?}");
                queries += 1;
            }
        }
    }
    Ok(format!("{queries} queries match"))
}

fn gradient_check() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for pair in 0..10u64 {
        let mut net = init_params(&DEFAULT_LAYER_SIZES, 500 + pair).map_err(|e| e.to_string())?;
        let mut rng = seed::rng(600 + pair);
        // nonzero biases and output weights keep units off the ReLU kink
        for l in 0..net.n_layers() {
            net.bias_mut(l).iter_mut().for_each(|b| *b = rng.random_range(-0.5..0.5));
        }
        let last = net.n_layers() - 1;
        net.weights_mut(last).iter_mut().for_each(|w| *w = rng.random_range(-0.3..0.3));
        let batch = rng.random_range(1..=32);
        let xs: Vec<Vec<f64>> = (0..batch).map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<f64> = (0..batch).map(|_| rng.random_range(-2.0..2.0)).collect();
        let report = check_gradients(&net, &xs, &ys, 1e-6).map_err(|e| e.to_string())?;
        ensure!(report.checked > 0, "pair {pair}: nothing checked");
        worst = worst.max(report.max_relative_error);
    }
    let elapsed = start.elapsed();
    ensure!(worst < 1e-4, "max relative error {worst:e}");
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("max relative error {worst:.2e} in {elapsed:.2?}"))
}

fn lime_recovery() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(77);
    let mut worst: f64 = 0.0;
    let mut worst_null: f64 = 0.0;
    for case in 0..20u64 {
        let mut coef: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
        let null = rng.random_range(0..3);
        coef[null] = 0.0;
        let bias = rng.random_range(-50.0..50.0);
        let instance: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..600.0)).collect();
        let stds: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..30.0)).collect();
        let c = coef.clone();
        let f = FnPredictor { n_features: 3, f: move |x: &[f64]| bias + c.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() };
        let cfg = LimeConfig { ridge_lambda: 1e-8, seed: case, ..Default::default() };
        let e = explain(&f, &instance, &stds, &cfg).map_err(|e| e.to_string())?;
        let max_w = e.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        for j in 0..3 {
            // weights are per feature std
            worst = worst.max((e.weights[j] - coef[j] * stds[j]).abs());
        }
        worst_null = worst_null.max(e.weights[null].abs() / max_w);
    }
    let elapsed = start.elapsed();
    ensure!(worst < 1e-5, "max weight error {worst:e}");
    ensure!(worst_null < 1e-3, "null feature ratio {worst_null:e}");
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("max error {worst:.2e}, null ratio {worst_null:.2e} in {elapsed:.2?}"))
}

/// Every `{mae, mse, r2}` object in a JSON document.
fn collect_metrics(v: &Value, out: &mut Vec<(f64, f64)>) {
    match v {
        Value::Object(map) => {
            if let (Some(mae), Some(mse)) = (map.get("mae").and_then(Value::as_f64), map.get("mse").and_then(Value::as_f64)) {
                if map.contains_key("r2") {
                    out.push((mae, mse));
                }
            }
            map.values().for_each(|x| collect_metrics(x, out));
        }
        Value::Array(items) => items.iter().for_each(|x| collect_metrics(x, out)),
        _ => {}
    }
}

fn metric_identities(evaluations: &[(f64, f64)]) -> Outcome {
    let m = compute_metrics(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    ensure!((m.mae - 2.0 / 3.0).abs() < 1e-12, "mae {}", m.mae);
    ensure!((m.mse - 2.0 / 3.0).abs() < 1e-12, "mse {}", m.mse);
    ensure!(m.r2.is_some_and(|r| r.abs() < 1e-12), "r2 {:?}", m.r2);
    ensure!(!evaluations.is_empty(), "no evaluations collected");
    for &(mae, mse) in evaluations {
        ensure!(mae * mae <= mse * (1.0 + 1e-12), "mae² > mse: {mae}² vs {mse}");
    }
    Ok(format!("hand triple exact, mae² ≤ mse on {} evaluations", evaluations.len()))
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.clone(), std::fs::read(&p).unwrap()))
        .collect()
}

struct Pipeline {
    out: PathBuf,
    config: PathBuf,
    elapsed: Duration,
}

fn run_pipeline(dir: &Path) -> Result<Pipeline, String> {
    let out = dir.join("pipeline");
    let config = dir.join("pipeline.json");
    let doc = serde_json::json!({ "out": out, "target": "length", "seed": 42 });
    std::fs::write(&config, doc.to_string()).map_err(|e| e.to_string())?;
    let elapsed = smote_reg_cmd(&["pipeline", "--config", p(&config)])?;
    Ok(Pipeline { out, config, elapsed })
}

fn end_to_end(run: &Pipeline) -> Outcome {
    let report = read_json(&run.out.join("cv_report.json"))?;
    let summary = read_json(&run.out.join("run_summary.json"))?;
    ensure!(summary["counts"]["augment"]["total"] == 9100, "augmented to {}", summary["counts"]["augment"]["total"]);
    let cv = &report["cross_validation"];
    ensure!(cv["k"] == 10, "k = {}", cv["k"]);
    let oof = cv["original_subset"]["r2"].as_f64().ok_or("no out-of-fold R²")?;
    let in_training = report["in_training_original"]["r2"].as_f64().ok_or("no in-training R²")?;
    let (mean, std) = (cv["mean"]["r2"].as_f64(), cv["std"]["r2"].as_f64());
    ensure!(oof >= 0.90, "out-of-fold original R² {oof}");
    ensure!(in_training >= oof, "in-training R² {in_training} < out-of-fold {oof}");
    ensure!(
        mean.is_some_and(f64::is_finite) && std.is_some_and(f64::is_finite),
        "whole-data R² {mean:?} ± {std:?}"
    );
    ensure!(run.elapsed < Duration::from_secs(300), "took {:?}", run.elapsed);
    Ok(format!(
        "original R² out-of-fold {oof:.4}, in-training {in_training:.4}, whole {:.4}±{:.4}, {:.1?}",
        mean.unwrap(),
        std.unwrap(),
        run.elapsed
    ))
}

fn determinism(dir: &Path, first: &Pipeline) -> Outcome {
    let before = snapshot(&first.out);
    smote_reg_cmd(&["pipeline", "--config", p(&first.config)])?;
    let after = snapshot(&first.out);
    ensure!(before == after, "pipeline outputs differ between runs");
    let mut files = after.len();

    let data = dir.join("det/data");
    let model = dir.join("det/model");
    let commands: Vec<Vec<String>> = vec![
        vec!["synth-data".into(), "--n".into(), "28".into(), "--out".into(), p(&data).into()],
        vec!["augment".into(), "--input".into(), p(&data.join("benchmark.csv")).into(), "--out".into(), p(&dir.join("det/aug")).into()],
        vec!["train".into(), "--epochs".into(), "10".into(), "--out".into(), p(&model).into()],
        vec!["cv".into(), "--epochs".into(), "5".into(), "--k-folds".into(), "3".into(), "--out".into(), p(&dir.join("det/cv")).into()],
        vec!["predict".into(), "--model".into(), p(&model.join("model.txt")).into(), "--input".into(), p(&data.join("benchmark.csv")).into(), "--out".into(), p(&dir.join("det/pred")).into()],
        vec!["explain".into(), "--model".into(), p(&model.join("model.txt")).into(), "--input".into(), p(&data.join("benchmark.csv")).into(), "--out".into(), p(&dir.join("det/explain")).into()],
    ];
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = PathBuf::from(args[args.len() - 1]);
        smote_reg_cmd(&args)?;
        let a = snapshot(&out);
        smote_reg_cmd(&args)?;
        ensure!(a == snapshot(&out), "`{}` outputs differ between runs", args[0]);
        files += a.len();
    }
    Ok(format!("{files} files byte-identical across repeated runs of all commands"))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("sample count", sample_count(dir.path())),
        ("interpolation invariant", interpolation_invariant()),
        ("knn oracle", knn_oracle()),
        ("gradient check", gradient_check()),
        ("lime linear recovery", lime_recovery()),
    ];

    let pipeline = run_pipeline(dir.path());
    let mut evaluations = Vec::new();
    if let Ok(run) = &pipeline {
        for file in ["cv_report.json", "run_summary.json"] {
            if let Ok(v) = read_json(&run.out.join(file)) {
                collect_metrics(&v, &mut evaluations);
            }
        }
    }
    results.push(("metric identities", metric_identities(&evaluations)));
    match &pipeline {
        Ok(run) => {
            results.push(("end-to-end benchmark", end_to_end(run)));
            results.push(("determinism", determinism(dir.path(), run)));
        }
        Err(e) => {
            results.push(("end-to-end benchmark", Err(e.clone())));
            results.push(("determinism", Err(e.clone())));
        }
    }

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
