use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{compute_metrics, Metrics};
use crate::dataset::{kfold_split, Dataset, Table};
use crate::error::{Error, Result};
use crate::model::{train, MlpModel, TrainConfig};
use crate::numfmt::format_sig;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    /// Training seed used for each fold.
    pub fold_seeds: Vec<u64>,
    pub fold_sizes: Vec<usize>,
    pub per_fold: Vec<Metrics>,
    pub mean: Metrics,
    /// Population standard deviation across folds.
    pub std: Metrics,
    /// Out-of-fold predictions for the original rows, pooled over folds.
    pub original_subset: Option<Metrics>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Field-wise mean and population std; R² only when every fold defines it.
pub fn aggregate(per_fold: &[Metrics]) -> (Metrics, Metrics) {
    let field = |f: fn(&Metrics) -> f64| mean_std(&per_fold.iter().map(f).collect::<Vec<_>>());
    let (mae_m, mae_s) = field(|m| m.mae);
    let (mse_m, mse_s) = field(|m| m.mse);
    let r2: Option<Vec<f64>> = per_fold.iter().map(|m| m.r2).collect();
    let (r2_m, r2_s) = match r2 {
        Some(v) => {
            let (m, s) = mean_std(&v);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    (
        Metrics { mae: mae_m, mse: mse_m, r2: r2_m },
        Metrics { mae: mae_s, mse: mse_s, r2: r2_s },
    )
}

struct FoldResult {
    metrics: Metrics,
    test: Vec<usize>,
    predictions: Vec<f64>,
}

/// k-fold cross-validation of the regressor. Fold `f` trains with seed
/// `derive(seed, f + 1)`; the fold plan uses `derive(seed, 0)`.
pub fn cross_validate(data: &Dataset, k: usize, cfg: &TrainConfig, seed: u64) -> Result<CvReport> {
    cfg.validate()?;
    let n = data.len();
    let plan = kfold_split(n, k, seed::derive(seed, 0))?;
    let fold_seeds: Vec<u64> = (0..k as u64).map(|f| seed::derive(seed, f + 1)).collect();

    let results = (0..k)
        .into_par_iter()
        .map(|fold| -> Result<FoldResult> {
            let test = plan.test_indices(fold);
            let train_idx = plan.train_indices(fold);
            if test.is_empty() || train_idx.is_empty() {
                return Err(Error::config(format!("fold {fold} is too small to evaluate")));
            }
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            if train_idx.iter().any(|&i| in_test[i]) {
                return Err(Error::Invariant(format!("fold {fold}: held-out row in training set")));
            }
            let fold_cfg = TrainConfig { seed: fold_seeds[fold], ..cfg.clone() };
            let (model, _) = train(&data.subset(&train_idx)?, &fold_cfg)?;
            let held_out = data.subset(&test)?;
            let predictions = model.predict_dataset(&held_out)?;
            let metrics = compute_metrics(&predictions, &held_out.targets())?;
            Ok(FoldResult { metrics, test, predictions })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut oof = vec![f64::NAN; n];
    let mut covered = vec![0usize; n];
    for r in &results {
        for (&i, &p) in r.test.iter().zip(&r.predictions) {
            oof[i] = p;
            covered[i] += 1;
        }
    }
    if covered.iter().any(|&c| c != 1) {
        return Err(Error::Invariant("folds do not cover every row exactly once".into()));
    }

    let originals = data.original_indices();
    let original_subset = if originals.is_empty() {
        None
    } else {
        let preds: Vec<f64> = originals.iter().map(|&i| oof[i]).collect();
        let ys: Vec<f64> = originals.iter().map(|&i| data.samples()[i].target).collect();
        Some(compute_metrics(&preds, &ys)?)
    };

    let per_fold: Vec<Metrics> = results.iter().map(|r| r.metrics).collect();
    let (mean, std) = aggregate(&per_fold);
    Ok(CvReport {
        k,
        seed,
        fold_seeds,
        fold_sizes: plan.fold_sizes(),
        per_fold,
        mean,
        std,
        original_subset,
    })
}

/// Trains once on all rows and scores the original rows with that model.
pub fn evaluate_in_training(data: &Dataset, cfg: &TrainConfig) -> Result<(MlpModel, Option<Metrics>)> {
    let (model, _) = train(data, cfg)?;
    let originals = data.original_indices();
    if originals.is_empty() {
        return Ok((model, None));
    }
    let subset = data.subset(&originals)?;
    let metrics = compute_metrics(&model.predict_dataset(&subset)?, &subset.targets())?;
    Ok((model, Some(metrics)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoldoutRow {
    pub actual: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoldoutReport {
    pub rows: Vec<HoldoutRow>,
    pub metrics: Metrics,
}

/// Scores a trained model on rows it has not seen. Disjointness from the
/// training set is the caller's responsibility.
pub fn evaluate_holdout(model: &MlpModel, data: &Dataset) -> Result<HoldoutReport> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predicted = model.predict_dataset(data)?;
    let actual = data.targets();
    let metrics = compute_metrics(&predicted, &actual)?;
    let rows = actual
        .into_iter()
        .zip(predicted)
        .map(|(actual, predicted)| HoldoutRow { actual, predicted })
        .collect();
    Ok(HoldoutReport { rows, metrics })
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format_sig(v, 10)).unwrap_or_else(|| "undefined".into())
}

fn pm(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{}±{}", format_sig(m, 10), format_sig(s, 10)),
        _ => "undefined".into(),
    }
}

impl CvReport {
    /// Summary in the layout of a results table: original rows, then the
    /// whole dataset as mean±std over folds.
    pub fn to_table(&self, target: &str, in_training: Option<&Metrics>) -> Table {
        let mut rows = Vec::new();
        let mut single = |scope: String, m: &Metrics| {
            rows.push(vec![scope, target.to_string(), cell(Some(m.mae)), cell(Some(m.mse)), cell(m.r2)]);
        };
        if let Some(m) = in_training {
            single("original (in-training)".into(), m);
        }
        if let Some(m) = &self.original_subset {
            single(format!("original (out-of-fold, {}-fold)", self.k), m);
        }
        rows.push(vec![
            format!("whole ({}-fold cross validation)", self.k),
            target.to_string(),
            pm(Some(self.mean.mae), Some(self.std.mae)),
            pm(Some(self.mean.mse), Some(self.std.mse)),
            pm(self.mean.r2, self.std.r2),
        ]);
        Table {
            headers: ["scope", "target", "mae", "mse", "r2"].map(String::from).to_vec(),
            rows,
        }
    }
}
