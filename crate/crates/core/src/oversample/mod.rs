//! Oversampling for regression targets.
//!
//! Every size-`T` subset of the data is treated in turn as a temporary
//! minority class. SMOTE runs on each subset, interpolating the target with
//! the same coefficient as the features, and the synthetics from all subsets
//! are appended to the original rows before exact duplicates are dropped.
//!
//! One seeded stream drives the whole run and is consumed in a fixed order:
//! subsets lexicographically, then parents, then synthetics, and for each
//! synthetic a neighbor draw followed by a lambda draw.

mod knn;
mod smote;

pub use knn::knn;
pub use smote::{interpolate, smote, SmoteConfig, SyntheticSample};

use serde::Serialize;

use crate::dataset::{dedup, Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::seed;

/// Upper bound on synthetics from one augmentation run.
pub const MAX_SYNTHETICS: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassLabel {
    Minority = 1,
    Majority = 2,
}

/// One relabeling of the dataset: `minority_indices` form class 1, the rest
/// class 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinoritySplit {
    pub minority_indices: Vec<usize>,
}

impl MinoritySplit {
    pub fn label(&self, index: usize) -> ClassLabel {
        if self.minority_indices.binary_search(&index).is_ok() {
            ClassLabel::Minority
        } else {
            ClassLabel::Majority
        }
    }
}

/// Lexicographic iterator over all `t`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Splits {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Splits {
    type Item = MinoritySplit;

    fn next(&mut self) -> Option<MinoritySplit> {
        let cur = self.current.as_mut()?;
        let out = MinoritySplit { minority_indices: cur.clone() };
        let t = cur.len();
        // rightmost position that can still advance
        match (0..t).rev().find(|&i| cur[i] < self.n - t + i) {
            Some(i) => {
                cur[i] += 1;
                for j in i + 1..t {
                    cur[j] = cur[j - 1] + 1;
                }
            }
            None => self.current = None,
        }
        Some(out)
    }
}

pub fn enumerate_splits(n: usize, t: usize) -> Result<Splits> {
    if t < 2 || t > n {
        return Err(Error::config(format!("minority size {t} must lie in 2..={n}")));
    }
    Ok(Splits { n, current: Some((0..t).collect()) })
}

/// Binomial coefficient, `None` on overflow.
pub fn n_choose_k(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation {
    pub dataset: Dataset,
    pub subsets: usize,
    pub synthetics_generated: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AugmentCounts {
    pub originals: usize,
    pub subsets: usize,
    pub synthetics_before_dedup: usize,
    pub synthetics_after_dedup: usize,
    pub duplicates_removed: usize,
    pub total: usize,
}

impl Augmentation {
    pub fn counts(&self) -> AugmentCounts {
        let total = self.dataset.len();
        let originals = self.dataset.count_original();
        AugmentCounts {
            originals,
            subsets: self.subsets,
            synthetics_before_dedup: self.synthetics_generated,
            synthetics_after_dedup: total - originals,
            duplicates_removed: self.duplicates_removed,
            total,
        }
    }
}

/// Runs SMOTE on every minority split and returns originals followed by the
/// de-duplicated synthetics. Provenance indices point into `data`.
pub fn smote_reg(data: &Dataset, cfg: &SmoteConfig) -> Result<Augmentation> {
    cfg.validate()?;
    let n = data.len();
    let splits = enumerate_splits(n, cfg.minority_size)?;
    let n_splits = n_choose_k(n, cfg.minority_size).unwrap_or(u128::MAX);
    let (retained, per_parent) = cfg.schedule();
    let planned = n_splits.saturating_mul((retained * per_parent) as u128);
    if planned > MAX_SYNTHETICS {
        return Err(Error::config(format!(
            "configuration would generate {planned} synthetics (limit {MAX_SYNTHETICS})"
        )));
    }

    let scaled: Option<Vec<Vec<f64>>> = if cfg.standardize_distances {
        let scaler = Standardizer::fit_rows(data.features())?;
        Some(data.features().map(|f| scaler.transform_row(f)).collect::<Result<_>>()?)
    } else {
        None
    };
    let point = |i: usize| -> &[f64] {
        match &scaled {
            Some(rows) => &rows[i],
            None => &data.samples()[i].features,
        }
    };

    let mut rng = seed::rng(cfg.seed);
    let mut samples = data.samples().to_vec();
    let mut subsets = 0;
    for split in splits {
        subsets += 1;
        let idx = &split.minority_indices;
        let minority: Vec<_> = idx.iter().map(|&i| data.samples()[i].clone()).collect();
        let points: Vec<&[f64]> = idx.iter().map(|&i| point(i)).collect();
        for mut syn in smote::smote_with_rng(&minority, &points, cfg, &mut rng)? {
            syn.parent_index = idx[syn.parent_index];
            syn.neighbor_index = idx[syn.neighbor_index];
            samples.push(syn.into_sample());
        }
    }
    let synthetics_generated = samples.len() - n;
    let combined = data.with_samples(samples)?;
    let before = combined.len();
    let dataset = dedup(&combined, 0.0);
    Ok(Augmentation {
        duplicates_removed: before - dataset.len(),
        dataset,
        subsets,
        synthetics_generated,
    })
}
