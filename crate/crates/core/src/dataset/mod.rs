//! Tabular regression data: samples, CSV ingestion, z-scoring, fold plans,
//! duplicate removal and the nanorod benchmark generator.

mod benchmark;
mod csv_io;
mod folds;
mod standardize;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use benchmark::{
    ground_truth, synth_benchmark, synth_records, write_records_csv, NanorodRecord,
    NanorodTarget, CORE_AMOUNT_RANGE, CORE_EDGE_RANGE, FEATURE_COLUMNS, S_AMOUNT_RANGE,
};
pub use csv_io::{load_csv, write_csv, Table, PROVENANCE_COLUMNS};
pub use folds::{kfold_split, FoldPlan};
pub use standardize::{fit_standardizer, Standardizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    Synthetic,
}

/// Where a synthetic sample came from: `parent + lambda * (neighbor - parent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub parent_index: usize,
    pub neighbor_index: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub target: f64,
    pub origin: Origin,
    pub provenance: Option<Provenance>,
}

impl Sample {
    pub fn original(features: Vec<f64>, target: f64) -> Self {
        Sample {
            features,
            target,
            origin: Origin::Original,
            provenance: None,
        }
    }

    pub fn is_original(&self) -> bool {
        self.origin == Origin::Original
    }
}

/// An ordered, non-empty set of samples sharing one feature layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    target_name: String,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        target_name: impl Into<String>,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        let target_name = target_name.into();
        if feature_names.is_empty() {
            return Err(Error::config("at least one feature column is required"));
        }
        let mut seen = HashSet::new();
        for name in feature_names.iter().chain(std::iter::once(&target_name)) {
            if name.is_empty() {
                return Err(Error::config("column names must be non-empty"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::config(format!("duplicate column name `{name}`")));
            }
        }
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let width = feature_names.len();
        for (i, s) in samples.iter().enumerate() {
            crate::error::check_len(width, s.features.len())?;
            if !s.target.is_finite() || s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invariant(format!("sample {i} has a non-finite value")));
            }
        }
        Ok(Dataset {
            feature_names,
            target_name,
            samples,
        })
    }

    /// Same columns, different rows.
    pub fn with_samples(&self, samples: Vec<Sample>) -> Result<Self> {
        Dataset::new(self.feature_names.clone(), self.target_name.clone(), samples)
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        self.with_samples(indices.iter().map(|&i| self.samples[i].clone()).collect())
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn features(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.samples.iter().map(|s| s.features.as_slice())
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.target).collect()
    }

    pub fn count_original(&self) -> usize {
        self.samples.iter().filter(|s| s.is_original()).count()
    }

    pub fn original_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.samples[i].is_original()).collect()
    }
}

/// Drops every sample whose features and target all lie within `tol` of an
/// earlier surviving sample. Survivors keep their relative order.
pub fn dedup(data: &Dataset, tol: f64) -> Dataset {
    let kept = dedup_indices(data.samples(), tol);
    let samples = kept.into_iter().map(|i| data.samples[i].clone()).collect();
    Dataset {
        feature_names: data.feature_names.clone(),
        target_name: data.target_name.clone(),
        samples,
    }
}

fn dedup_indices(samples: &[Sample], tol: f64) -> Vec<usize> {
    if tol <= 0.0 {
        // Exact equality: hash the bit patterns, with -0.0 folded onto 0.0.
        let key = |s: &Sample| -> Vec<u64> {
            s.features
                .iter()
                .chain(std::iter::once(&s.target))
                .map(|v| (v + 0.0).to_bits())
                .collect()
        };
        let mut seen = HashSet::with_capacity(samples.len());
        return (0..samples.len())
            .filter(|&i| seen.insert(key(&samples[i])))
            .collect();
    }
    let close = |a: &Sample, b: &Sample| {
        (a.target - b.target).abs() <= tol
            && a.features
                .iter()
                .zip(&b.features)
                .all(|(x, y)| (x - y).abs() <= tol)
    };
    let mut kept: Vec<usize> = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        if !kept.iter().any(|&j| close(&samples[j], &samples[i])) {
            kept.push(i);
        }
    }
    kept
}
