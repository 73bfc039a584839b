use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smote_reg::dataset::{NanorodTarget, FEATURE_COLUMNS};
use smote_reg::explain::LimeConfig;
use smote_reg::model::TrainConfig;
use smote_reg::oversample::SmoteConfig;
use smote_reg::seed;

use crate::error::CliError;

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_target() -> String {
    "length".into()
}
fn default_features() -> Vec<String> {
    FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect()
}
fn default_n_rows() -> usize {
    28
}
fn default_holdout() -> usize {
    3
}
fn default_k_folds() -> usize {
    10
}
fn default_seed() -> u64 {
    42
}
fn default_true() -> bool {
    true
}

/// Everything a run needs. Loaded from one JSON document; command-line flags
/// overwrite individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Input CSV. Without one, commands generate the benchmark.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Saved model for `predict` and `explain`.
    #[serde(default)]
    pub model: Option<PathBuf>,
    /// `length`, `width`, `aspect_ratio`, or any other column name.
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_features")]
    pub features: Vec<String>,
    /// Benchmark size when no input is given.
    #[serde(default = "default_n_rows")]
    pub n_rows: usize,
    /// Extra unseen benchmark rows scored by `pipeline`.
    #[serde(default = "default_holdout")]
    pub holdout_rows: usize,
    /// Run SMOTE-REG on inputs that are not already augmented.
    #[serde(default = "default_true")]
    pub augment: bool,
    #[serde(default = "default_k_folds")]
    pub k_folds: usize,
    /// Also train on all rows and score the originals in-sample.
    #[serde(default = "default_true")]
    pub in_training: bool,
    #[serde(default)]
    pub smote: SmoteConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub lime: LimeConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

/// Sub-seeds fanned out from the global seed, one per randomized stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub global: u64,
    pub synth: u64,
    pub holdout: u64,
    pub smote: u64,
    pub train: u64,
    pub cv: u64,
    pub lime: u64,
}

impl Seeds {
    pub fn from_global(global: u64) -> Self {
        Seeds {
            global,
            synth: seed::derive(global, 1),
            holdout: seed::derive(global, 2),
            smote: seed::derive(global, 3),
            train: seed::derive(global, 4),
            cv: seed::derive(global, 5),
            lime: seed::derive(global, 6),
        }
    }
}

/// Flag values that override the loaded config.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub target: Option<String>,
    pub input: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub n_rows: Option<usize>,
    pub k_folds: Option<usize>,
    pub epochs: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.apply(flags);
        cfg.seed_stages();
        Ok(cfg)
    }

    pub fn apply(&mut self, flags: &Overrides) {
        if let Some(s) = flags.seed {
            self.seed = s;
        }
        if let Some(o) = &flags.out {
            self.out = o.clone();
        }
        if let Some(t) = &flags.target {
            self.target = t.clone();
        }
        if let Some(i) = &flags.input {
            self.input = Some(i.clone());
        }
        if let Some(m) = &flags.model {
            self.model = Some(m.clone());
        }
        if let Some(n) = flags.n_rows {
            self.n_rows = n;
        }
        if let Some(k) = flags.k_folds {
            self.k_folds = k;
        }
        if let Some(e) = flags.epochs {
            self.train.epochs = e;
        }
    }

    /// Overwrites nested stage seeds with the global fan-out.
    fn seed_stages(&mut self) {
        let s = self.seeds();
        self.smote.seed = s.smote;
        self.train.seed = s.train;
        self.lime.seed = s.lime;
    }

    pub fn seeds(&self) -> Seeds {
        Seeds::from_global(self.seed)
    }

    /// Column holding the target: the benchmark names map to their columns.
    pub fn target_column(&self) -> String {
        match self.benchmark_target() {
            Some(t) => t.column().to_string(),
            None => self.target.clone(),
        }
    }

    pub fn benchmark_target(&self) -> Option<NanorodTarget> {
        match self.target.as_str() {
            "length" | "length_nm" => Some(NanorodTarget::Length),
            "width" | "width_nm" => Some(NanorodTarget::Width),
            "aspect_ratio" => Some(NanorodTarget::AspectRatio),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.smote.validate()?;
        self.train.validate()?;
        self.lime.validate()?;
        if self.features.is_empty() {
            return Err(CliError::config("at least one feature column is required"));
        }
        if self.features.contains(&self.target_column()) {
            return Err(CliError::config("target column is also listed as a feature"));
        }
        if self.k_folds < 2 {
            return Err(CliError::usage("k_folds must be at least 2"));
        }
        Ok(())
    }
}
