use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::network::{init_params, BatchWorkspace, Network};
use crate::dataset::{Dataset, Standardizer};
use crate::error::{check_len, Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

fn default_lr() -> f64 {
    0.001
}
fn default_epochs() -> usize {
    500
}
fn default_batch() -> usize {
    32
}
fn default_optimizer() -> Optimizer {
    Optimizer::Adam
}
fn default_hidden() -> Vec<usize> {
    vec![64, 64]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    /// Clamped to the training-set size.
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_optimizer")]
    pub optimizer: Optimizer,
    #[serde(default = "default_hidden")]
    pub hidden_layers: Vec<usize>,
    /// z-score the target as well as the features.
    #[serde(default = "default_true")]
    pub scale_target: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: default_lr(),
            epochs: default_epochs(),
            batch_size: default_batch(),
            optimizer: default_optimizer(),
            hidden_layers: default_hidden(),
            scale_target: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be positive"));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::config("epochs and batch size must be positive"));
        }
        if self.hidden_layers.contains(&0) {
            return Err(Error::config("hidden layers must be non-empty"));
        }
        Ok(())
    }

    pub fn layer_sizes(&self, n_features: usize) -> Vec<usize> {
        let mut sizes = vec![n_features];
        sizes.extend_from_slice(&self.hidden_layers);
        sizes.push(1);
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    /// Mean squared error over each epoch's minibatches, z-scored units.
    pub loss_history: Vec<f64>,
    pub final_epoch: usize,
}

/// A trained network together with the scalers fitted on its training data.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub network: Network,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub feature_scaler: Standardizer,
    pub target_scaler: Standardizer,
}

impl MlpModel {
    pub fn n_features(&self) -> usize {
        self.network.n_inputs()
    }

    /// Raw-unit features in, raw-unit target out.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        check_len(self.n_features(), features.len())?;
        let z = self.feature_scaler.transform_row(features)?;
        let out = self.network.predict(&z)?;
        Ok(self.target_scaler.inverse_value(0, out))
    }

    pub fn predict_batch<X: AsRef<[f64]>>(&self, rows: &[X]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict(r.as_ref())).collect()
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        data.features().map(|r| self.predict(r)).collect()
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.step += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.step);
        let c2 = 1.0 - ADAM_BETA2.powi(self.step);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            // moments of dead units decay through the subnormal range, which
            // is very slow on x86; flush them
            if m.abs() < f64::MIN_POSITIVE {
                *m = 0.0;
            }
            if *v < f64::MIN_POSITIVE {
                *v = 0.0;
            }
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        }
    }
}

/// Fits scalers on `data`, then runs shuffled minibatch descent on the
/// batch-mean squared error in z-scored space.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<(MlpModel, TrainReport)> {
    cfg.validate()?;
    let n = data.len();
    let nf = data.n_features();
    let feature_scaler = Standardizer::fit_rows(data.features())?;
    let target_scaler = if cfg.scale_target {
        Standardizer::fit_values(&data.targets())?
    } else {
        Standardizer::from_parts(vec![0.0], vec![1.0])?
    };

    let mut xs = Vec::with_capacity(n * nf);
    for row in data.features() {
        xs.extend(feature_scaler.transform_row(row)?);
    }
    let ys: Vec<f64> = data
        .samples()
        .iter()
        .map(|s| target_scaler.transform_value(0, s.target))
        .collect();

    let mut network = init_params(&cfg.layer_sizes(nf), seed::derive(cfg.seed, 0))?;
    let mut shuffle_rng = seed::rng(seed::derive(cfg.seed, 1));
    let batch_size = cfg.batch_size.min(n);
    let n_params = network.params().len();
    let mut adam = Adam::new(n_params);
    let mut grad = vec![0.0; n_params];
    let mut ws = BatchWorkspace::new(&network, batch_size);
    let mut batch_x = Vec::with_capacity(batch_size * nf);
    let mut batch_y = Vec::with_capacity(batch_size);
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_sse = 0.0;
        for batch in order.chunks(batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            batch_x.clear();
            batch_y.clear();
            for &i in batch {
                batch_x.extend_from_slice(&xs[i * nf..(i + 1) * nf]);
                batch_y.push(ys[i]);
            }
            epoch_sse += network.batch_gradient(&batch_x, &batch_y, &mut ws, &mut grad);
            match cfg.optimizer {
                Optimizer::Adam => adam.update(network.params_mut(), &grad, cfg.learning_rate),
                Optimizer::Sgd => {
                    for (p, g) in network.params_mut().iter_mut().zip(&grad) {
                        *p -= cfg.learning_rate * g;
                    }
                }
            }
        }
        let epoch_loss = epoch_sse / n as f64;
        if !epoch_loss.is_finite() || !network.is_finite() {
            return Err(Error::Divergence { epoch, loss: epoch_loss });
        }
        loss_history.push(epoch_loss);
    }

    let model = MlpModel {
        network,
        feature_names: data.feature_names().to_vec(),
        target_name: data.target_name().to_string(),
        feature_scaler,
        target_scaler,
    };
    Ok((
        model,
        TrainReport {
            final_epoch: loss_history.len(),
            loss_history,
        },
    ))
}
