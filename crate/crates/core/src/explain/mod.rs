//! Local surrogate explanations.
//!
//! An instance is perturbed with Gaussian noise scaled by each feature's
//! training std, the black box scores every perturbation, and a weighted
//! ridge regression in standardized coordinates centered on the instance
//! gives one weight per feature: the local change in the raw-unit target per
//! one-std move of that feature.

mod solve;

pub use solve::{weighted_ridge, LinearFit};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Table;
use crate::error::{check_len, Error, Result};
use crate::model::MlpModel;
use crate::numfmt::format_sig;
use crate::seed;

/// Anything that maps a raw-unit feature vector to a prediction.
pub trait Predictor: Sync {
    fn n_features(&self) -> usize;
    fn predict(&self, x: &[f64]) -> Result<f64>;
}

impl Predictor for MlpModel {
    fn n_features(&self) -> usize {
        MlpModel::n_features(self)
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        MlpModel::predict(self, x)
    }
}

/// Wraps a plain function as a [`Predictor`].
pub struct FnPredictor<F> {
    pub n_features: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Predictor for FnPredictor<F> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_len(self.n_features, x.len())?;
        Ok((self.f)(x))
    }
}

fn default_n_perturb() -> usize {
    5000
}
fn default_scale() -> f64 {
    1.0
}
fn default_ridge() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimeConfig {
    /// Rows in the perturbation set, the instance itself included.
    #[serde(default = "default_n_perturb")]
    pub n_perturb: usize,
    /// Noise std as a multiple of each feature's training std.
    #[serde(default = "default_scale")]
    pub perturb_scale: f64,
    /// Kernel width in standardized units; `None` means `0.75 * sqrt(F)`.
    #[serde(default)]
    pub kernel_width: Option<f64>,
    #[serde(default = "default_ridge")]
    pub ridge_lambda: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            n_perturb: default_n_perturb(),
            perturb_scale: default_scale(),
            kernel_width: None,
            ridge_lambda: default_ridge(),
            seed: 0,
        }
    }
}

impl LimeConfig {
    pub fn width_for(&self, n_features: usize) -> f64 {
        self.kernel_width.unwrap_or(0.75 * (n_features as f64).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_perturb == 0 {
            return Err(Error::config("n_perturb must be positive"));
        }
        if !is_positive(self.perturb_scale) || self.kernel_width.is_some_and(|w| !is_positive(w)) {
            return Err(Error::config("perturb_scale and kernel_width must be positive"));
        }
        if self.ridge_lambda.is_nan() || self.ridge_lambda < 0.0 {
            return Err(Error::config("ridge_lambda must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub instance: Vec<f64>,
    /// Surrogate value at the instance.
    pub intercept: f64,
    /// Per-feature weights, target units per feature std.
    pub weights: Vec<f64>,
    /// Weighted R² of the surrogate; `None` for a flat response.
    pub local_r2: Option<f64>,
}

fn is_positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

fn check_stds(instance: &[f64], stds: &[f64]) -> Result<()> {
    check_len(instance.len(), stds.len())?;
    if !stds.iter().all(|&s| is_positive(s)) {
        return Err(Error::config("feature stds must be positive"));
    }
    Ok(())
}

/// The instance followed by `n_perturb - 1` Gaussian neighbors.
pub fn perturb(instance: &[f64], feature_stds: &[f64], cfg: &LimeConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    check_stds(instance, feature_stds)?;
    let mut rng = seed::rng(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.n_perturb);
    rows.push(instance.to_vec());
    for _ in 1..cfg.n_perturb {
        rows.push(
            instance
                .iter()
                .zip(feature_stds)
                .map(|(x, s)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + z * cfg.perturb_scale * s
                })
                .collect(),
        );
    }
    Ok(rows)
}

/// `exp(-d² / width²)` with `d` measured in feature-std units.
pub fn kernel_weights<X: AsRef<[f64]>>(
    perturbations: &[X],
    instance: &[f64],
    feature_stds: &[f64],
    kernel_width: f64,
) -> Result<Vec<f64>> {
    check_stds(instance, feature_stds)?;
    if !is_positive(kernel_width) {
        return Err(Error::config("kernel width must be positive"));
    }
    perturbations
        .iter()
        .map(|row| {
            let row = row.as_ref();
            check_len(instance.len(), row.len())?;
            let d2: f64 = row
                .iter()
                .zip(instance)
                .zip(feature_stds)
                .map(|((x, c), s)| ((x - c) / s).powi(2))
                .sum();
            Ok((-d2 / (kernel_width * kernel_width)).exp())
        })
        .collect()
}

/// Weighted ridge surrogate over the given design rows.
pub fn fit_local_linear<X: AsRef<[f64]>>(
    design: &[X],
    responses: &[f64],
    weights: &[f64],
    ridge_lambda: f64,
) -> Result<LinearFit> {
    weighted_ridge(design, responses, weights, ridge_lambda)
}

pub fn explain(
    model: &dyn Predictor,
    instance: &[f64],
    feature_stds: &[f64],
    cfg: &LimeConfig,
) -> Result<Explanation> {
    check_len(model.n_features(), instance.len())?;
    let rows = perturb(instance, feature_stds, cfg)?;
    let responses = rows.iter().map(|r| model.predict(r)).collect::<Result<Vec<_>>>()?;
    let weights = kernel_weights(&rows, instance, feature_stds, cfg.width_for(instance.len()))?;
    let design: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(instance)
                .zip(feature_stds)
                .map(|((x, c), s)| (x - c) / s)
                .collect()
        })
        .collect();
    let fit = fit_local_linear(&design, &responses, &weights, cfg.ridge_lambda)?;
    if fit.coefficients.iter().any(|w| !w.is_finite()) || !fit.intercept.is_finite() {
        return Err(Error::Invariant("explanation has non-finite weights".into()));
    }
    Ok(Explanation {
        instance: instance.to_vec(),
        intercept: fit.intercept,
        weights: fit.coefficients,
        local_r2: fit.r2,
    })
}

/// One explanation per row, as exported for a feature-weight heatmap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    pub feature_names: Vec<String>,
    pub sample_ids: Vec<String>,
    pub explanations: Vec<Explanation>,
}

/// Explains every row; row `i` uses seed `derive(cfg.seed, i)`.
pub fn weight_matrix<X: AsRef<[f64]> + Sync>(
    model: &dyn Predictor,
    rows: &[X],
    feature_names: &[String],
    feature_stds: &[f64],
    cfg: &LimeConfig,
) -> Result<WeightMatrix> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_len(model.n_features(), feature_names.len())?;
    let explanations = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let row_cfg = LimeConfig { seed: seed::derive(cfg.seed, i as u64), ..cfg.clone() };
            explain(model, row.as_ref(), feature_stds, &row_cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let digits = rows.len().to_string().len().max(2);
    Ok(WeightMatrix {
        feature_names: feature_names.to_vec(),
        sample_ids: (1..=rows.len()).map(|i| format!("{i:0digits$}")).collect(),
        explanations,
    })
}

impl WeightMatrix {
    pub fn weights(&self) -> Vec<Vec<f64>> {
        self.explanations.iter().map(|e| e.weights.clone()).collect()
    }

    /// `sample_id`, signed weight per feature, then `abs_<feature>` columns;
    /// 10 significant digits.
    pub fn to_table(&self) -> Table {
        let mut headers = vec!["sample_id".to_string()];
        headers.extend(self.feature_names.iter().cloned());
        headers.extend(self.feature_names.iter().map(|n| format!("abs_{n}")));
        let rows = self
            .sample_ids
            .iter()
            .zip(&self.explanations)
            .map(|(id, e)| {
                let mut row = vec![id.clone()];
                row.extend(e.weights.iter().map(|&w| format_sig(w, 10)));
                row.extend(e.weights.iter().map(|&w| format_sig(w.abs(), 10)));
                row
            })
            .collect();
        Table { headers, rows }
    }
}
