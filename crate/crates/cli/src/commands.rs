use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use smote_reg::dataset::{self, Dataset, NanorodRecord, Sample, Table, PROVENANCE_COLUMNS};
use smote_reg::eval::{check_power_mean, cross_validate, evaluate_holdout, evaluate_in_training, Metrics};
use smote_reg::explain::weight_matrix;
use smote_reg::model::{load_model, save_model, train, MlpModel};
use smote_reg::numfmt::format_sig;
use smote_reg::oversample::{smote_reg, AugmentCounts};

use crate::config::RunConfig;
use crate::error::{Category, CliError};

type Result<T> = std::result::Result<T, CliError>;

/// Collects the contents of `run_summary.json`.
struct Summary<'a> {
    command: &'static str,
    cfg: &'a RunConfig,
    counts: Map<String, Value>,
    metrics: Map<String, Value>,
    outputs: Vec<String>,
}

impl<'a> Summary<'a> {
    fn new(command: &'static str, cfg: &'a RunConfig) -> Self {
        Summary { command, cfg, counts: Map::new(), metrics: Map::new(), outputs: Vec::new() }
    }

    fn count(&mut self, key: &str, value: impl Serialize) {
        self.counts.insert(key.into(), json!(value));
    }

    fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(key.into(), json!(value));
    }

    fn output(&mut self, path: &Path) -> PathBuf {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.push(name);
        path.to_path_buf()
    }

    fn write(self) -> Result<()> {
        let doc = json!({
            "command": self.command,
            "config": self.cfg,
            "seeds": self.cfg.seeds(),
            "counts": self.counts,
            "metrics": self.metrics,
            "outputs": self.outputs,
        });
        write_json(&self.cfg.out.join("run_summary.json"), &doc)
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::new(Category::Invariant, e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn prepare_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(format!("{}: {e}", cfg.out.display())))
}

fn records_table(records: &[NanorodRecord]) -> Table {
    let headers = dataset::FEATURE_COLUMNS
        .iter()
        .copied()
        .chain(dataset::NanorodTarget::ALL.iter().map(|t| t.column()))
        .map(String::from)
        .collect();
    let rows = records
        .iter()
        .map(|r| {
            [r.core_edge_nm, r.core_amount_nmol, r.s_amount_mg, r.length_nm, r.width_nm, r.aspect_ratio]
                .iter()
                .map(|&v| format_sig(v, 17))
                .collect()
        })
        .collect();
    Table { headers, rows }
}

fn records_dataset(records: &[NanorodRecord], cfg: &RunConfig) -> Result<Dataset> {
    let target = cfg
        .benchmark_target()
        .ok_or_else(|| CliError::usage(format!("target `{}` needs an --input file", cfg.target)))?;
    let samples = records.iter().map(|r| Sample::original(r.features().to_vec(), r.target(target))).collect();
    Ok(Dataset::new(cfg.features.clone(), target.column(), samples)?)
}

fn benchmark_records(n: usize, seed: u64) -> Result<Vec<NanorodRecord>> {
    if n == 0 {
        return Err(CliError::usage("number of rows must be positive"));
    }
    Ok(dataset::synth_records(n, seed)?)
}

/// The input file if one is configured, otherwise the generated benchmark.
fn load_input(cfg: &RunConfig) -> Result<Dataset> {
    match &cfg.input {
        Some(path) => Ok(Dataset::from_table(&Table::read(path)?, &cfg.features, &cfg.target_column())?),
        None => records_dataset(&benchmark_records(cfg.n_rows, cfg.seeds().synth)?, cfg),
    }
}

fn is_augmented(data: &Dataset) -> bool {
    data.count_original() < data.len()
}

/// Training data: pre-augmented input as is, otherwise augmented when enabled.
fn training_data(cfg: &RunConfig) -> Result<(Dataset, Option<AugmentCounts>)> {
    let data = load_input(cfg)?;
    if is_augmented(&data) || !cfg.augment {
        return Ok((data, None));
    }
    let aug = smote_reg(&data, &cfg.smote)?;
    let counts = aug.counts();
    Ok((aug.dataset, Some(counts)))
}

fn audit(label: &str, m: &Metrics) -> Result<()> {
    if !m.is_finite() {
        return Err(CliError::new(Category::Invariant, format!("{label}: non-finite metrics")));
    }
    check_power_mean(m).map_err(|e| CliError::new(Category::Invariant, format!("{label}: {e}")))
}

fn require<'p>(path: &'p Option<PathBuf>, flag: &str) -> Result<&'p PathBuf> {
    path.as_ref().ok_or_else(|| CliError::usage(format!("{flag} is required")))
}

pub fn synth_data(cfg: &RunConfig) -> Result<()> {
    let records = benchmark_records(cfg.n_rows, cfg.seeds().synth)?;
    prepare_out(cfg)?;
    let mut summary = Summary::new("synth-data", cfg);
    records_table(&records).write(summary.output(&cfg.out.join("benchmark.csv")))?;
    summary.count("rows", records.len());
    summary.write()
}

pub fn augment(cfg: &RunConfig) -> Result<()> {
    cfg.smote.validate()?;
    let data = load_input(cfg)?;
    if is_augmented(&data) {
        return Err(CliError::new(Category::Data, "input already contains synthetic rows"));
    }
    let aug = smote_reg(&data, &cfg.smote)?;
    prepare_out(cfg)?;
    let mut summary = Summary::new("augment", cfg);
    dataset::write_csv(&aug.dataset, summary.output(&cfg.out.join("augmented.csv")))?;
    summary.count("augment", aug.counts());
    summary.write()
}

fn write_loss(path: &Path, history: &[f64]) -> Result<()> {
    let rows = history
        .iter()
        .enumerate()
        .map(|(i, l)| vec![(i + 1).to_string(), format_sig(*l, 17)])
        .collect();
    Ok(Table { headers: vec!["epoch".into(), "loss".into()], rows }.write(path)?)
}

fn original_metrics(model: &MlpModel, data: &Dataset) -> Result<Option<Metrics>> {
    let idx = data.original_indices();
    if idx.is_empty() {
        return Ok(None);
    }
    let subset = data.subset(&idx)?;
    let m = smote_reg::eval::compute_metrics(&model.predict_dataset(&subset)?, &subset.targets())?;
    audit("in-training originals", &m)?;
    Ok(Some(m))
}

pub fn train_model(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let (data, counts) = training_data(cfg)?;
    let (model, report) = train(&data, &cfg.train)?;
    prepare_out(cfg)?;
    let mut summary = Summary::new("train", cfg);
    save_model(&model, summary.output(&cfg.out.join("model.txt")))?;
    write_loss(&summary.output(&cfg.out.join("loss_history.csv")), &report.loss_history)?;
    if let Some(c) = counts {
        summary.count("augment", c);
    }
    summary.count("training_rows", data.len());
    summary.metric("final_loss", report.loss_history.last());
    summary.metric("in_training_original", original_metrics(&model, &data)?);
    summary.write()
}

struct CvOutcome {
    report: smote_reg::eval::CvReport,
    in_training: Option<(MlpModel, Option<Metrics>)>,
}

fn run_cv(cfg: &RunConfig, data: &Dataset) -> Result<CvOutcome> {
    if cfg.k_folds > data.len() {
        return Err(CliError::usage(format!(
            "k_folds = {} exceeds the {} available rows",
            cfg.k_folds,
            data.len()
        )));
    }
    let report = cross_validate(data, cfg.k_folds, &cfg.train, cfg.seeds().cv)?;
    for (f, m) in report.per_fold.iter().enumerate() {
        audit(&format!("fold {f}"), m)?;
    }
    if let Some(m) = &report.original_subset {
        audit("out-of-fold originals", m)?;
    }
    let in_training = if cfg.in_training {
        let (model, m) = evaluate_in_training(data, &cfg.train)?;
        if let Some(m) = &m {
            audit("in-training originals", m)?;
        }
        Some((model, m))
    } else {
        None
    };
    Ok(CvOutcome { report, in_training })
}

fn write_cv(cfg: &RunConfig, summary: &mut Summary, out: &CvOutcome) -> Result<()> {
    let in_training = out.in_training.as_ref().and_then(|(_, m)| m.as_ref());
    let doc = json!({ "cross_validation": out.report, "in_training_original": in_training });
    write_json(&summary.output(&cfg.out.join("cv_report.json")), &doc)?;
    out.report
        .to_table(&cfg.target_column(), in_training)
        .write(summary.output(&cfg.out.join("cv_table.csv")))?;
    summary.metric("cv_mean", out.report.mean);
    summary.metric("cv_std", out.report.std);
    summary.metric("out_of_fold_original", out.report.original_subset);
    summary.metric("in_training_original", in_training);
    Ok(())
}

pub fn cv(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let (data, counts) = training_data(cfg)?;
    let outcome = run_cv(cfg, &data)?;
    prepare_out(cfg)?;
    let mut summary = Summary::new("cv", cfg);
    if let Some(c) = counts {
        summary.count("augment", c);
    }
    summary.count("rows", data.len());
    write_cv(cfg, &mut summary, &outcome)?;
    summary.write()
}

/// Feature rows of a CSV in the model's column order; synthetic rows skipped.
fn model_rows(table: &Table, model: &MlpModel) -> Result<Vec<Vec<f64>>> {
    let rows = table.numeric_rows(&model.feature_names)?;
    if !table.has_column(PROVENANCE_COLUMNS[0]) {
        return Ok(rows);
    }
    let p = table.column_index(PROVENANCE_COLUMNS[0])?;
    Ok(rows.into_iter().zip(&table.rows).filter(|(_, raw)| raw[p].is_empty()).map(|(r, _)| r).collect())
}

fn predictions_table(actual: Option<&[f64]>, predicted: &[f64]) -> Table {
    let mut headers = vec!["row".to_string()];
    if actual.is_some() {
        headers.push("actual".into());
    }
    headers.push("predicted".into());
    let rows = predicted
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![(i + 1).to_string()];
            if let Some(a) = actual {
                row.push(format_sig(a[i], 17));
            }
            row.push(format_sig(*p, 17));
            row
        })
        .collect();
    Table { headers, rows }
}

pub fn predict(cfg: &RunConfig) -> Result<()> {
    let model = load_model(require(&cfg.model, "--model")?)?;
    let table = Table::read(require(&cfg.input, "--input")?)?;
    let rows = model_rows(&table, &model)?;
    if rows.is_empty() {
        return Err(CliError::new(Category::Data, "no rows to predict"));
    }
    let predicted = model.predict_batch(&rows)?;
    let actual = if table.has_column(&model.target_name) {
        let data = Dataset::from_table(&table, &model.feature_names, &model.target_name)?;
        let idx = data.original_indices();
        Some(data.subset(&idx)?.targets())
    } else {
        None
    };
    prepare_out(cfg)?;
    let mut summary = Summary::new("predict", cfg);
    predictions_table(actual.as_deref(), &predicted).write(summary.output(&cfg.out.join("predictions.csv")))?;
    summary.count("rows", rows.len());
    if let Some(a) = &actual {
        let m = smote_reg::eval::compute_metrics(&predicted, a)?;
        audit("predictions", &m)?;
        summary.metric("predictions", m);
    }
    summary.write()
}

fn explain_rows(cfg: &RunConfig, summary: &mut Summary, model: &MlpModel, rows: &[Vec<f64>]) -> Result<()> {
    let stds = model.feature_scaler.stds();
    let matrix = weight_matrix(model, rows, &model.feature_names, stds, &cfg.lime)?;
    matrix.to_table().write(summary.output(&cfg.out.join("weight_matrix.csv")))?;
    let r2: Vec<Option<f64>> = matrix.explanations.iter().map(|e| e.local_r2).collect();
    summary.count("explained_rows", rows.len());
    summary.metric("local_r2", r2);
    Ok(())
}

pub fn explain(cfg: &RunConfig) -> Result<()> {
    cfg.lime.validate()?;
    let model = load_model(require(&cfg.model, "--model")?)?;
    let table = Table::read(require(&cfg.input, "--input")?)?;
    let rows = model_rows(&table, &model)?;
    if rows.is_empty() {
        return Err(CliError::new(Category::Data, "no rows to explain"));
    }
    prepare_out(cfg)?;
    let mut summary = Summary::new("explain", cfg);
    explain_rows(cfg, &mut summary, &model, &rows)?;
    summary.write()
}

/// Generate (or load) data, augment, cross-validate, train on everything,
/// score unseen rows and explain the originals.
pub fn pipeline(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let seeds = cfg.seeds();
    prepare_out(cfg)?;
    let mut summary = Summary::new("pipeline", cfg);

    let (originals, holdout) = match &cfg.input {
        Some(_) => (load_input(cfg)?, None),
        None => {
            let records = benchmark_records(cfg.n_rows, seeds.synth)?;
            records_table(&records).write(summary.output(&cfg.out.join("benchmark.csv")))?;
            let holdout = if cfg.holdout_rows > 0 {
                let h = dataset::synth_records(cfg.holdout_rows, seeds.holdout)?;
                records_table(&h).write(summary.output(&cfg.out.join("holdout.csv")))?;
                Some(records_dataset(&h, cfg)?)
            } else {
                None
            };
            (records_dataset(&records, cfg)?, holdout)
        }
    };
    if is_augmented(&originals) {
        return Err(CliError::new(Category::Data, "pipeline input already contains synthetic rows"));
    }

    let aug = smote_reg(&originals, &cfg.smote)?;
    dataset::write_csv(&aug.dataset, summary.output(&cfg.out.join("augmented.csv")))?;
    summary.count("augment", aug.counts());
    let data = aug.dataset;

    // the in-training model is the one scored and explained below
    let outcome = run_cv(&RunConfig { in_training: true, ..cfg.clone() }, &data)?;
    write_cv(cfg, &mut summary, &outcome)?;
    let (model, _) = outcome.in_training.as_ref().expect("in-training run requested");
    save_model(model, summary.output(&cfg.out.join("model.txt")))?;

    let scored = holdout.as_ref().unwrap_or(&originals);
    let report = evaluate_holdout(model, scored)?;
    audit("holdout", &report.metrics)?;
    let actual: Vec<f64> = report.rows.iter().map(|r| r.actual).collect();
    let predicted: Vec<f64> = report.rows.iter().map(|r| r.predicted).collect();
    predictions_table(Some(&actual), &predicted).write(summary.output(&cfg.out.join("predictions.csv")))?;
    summary.count("predicted_rows", report.rows.len());
    summary.metric(if holdout.is_some() { "holdout" } else { "predictions" }, report.metrics);

    let rows: Vec<Vec<f64>> = originals.features().map(<[f64]>::to_vec).collect();
    explain_rows(cfg, &mut summary, model, &rows)?;
    summary.write()
}
