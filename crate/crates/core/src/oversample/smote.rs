use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::knn;
use crate::dataset::{Origin, Provenance, Sample};
use crate::error::{check_len, Error, Result};
use crate::seed;

fn default_n_percent() -> u32 {
    1200
}

fn default_k() -> usize {
    1
}

fn default_minority() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoteConfig {
    /// Minority class size `T`.
    #[serde(default = "default_minority")]
    pub minority_size: usize,
    /// Oversampling amount `N%`.
    #[serde(default = "default_n_percent")]
    pub n_percent: u32,
    /// Neighbors considered per minority sample.
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    /// Measure neighbor distances on z-scored features instead of raw units.
    #[serde(default)]
    pub standardize_distances: bool,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            minority_size: default_minority(),
            n_percent: default_n_percent(),
            k: default_k(),
            seed: 0,
            standardize_distances: false,
        }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.minority_size < 2 {
            return Err(Error::config("minority size T must be at least 2"));
        }
        if self.k == 0 || self.k > self.minority_size - 1 {
            return Err(Error::config(format!(
                "k = {} must lie in 1..=T-1 = {}",
                self.k,
                self.minority_size - 1
            )));
        }
        if self.n_percent == 0 {
            return Err(Error::config("N% must be positive"));
        }
        Ok(())
    }

    /// `(retained minority samples, synthetics per retained sample)` after the
    /// N% < 100 rewrite.
    pub fn schedule(&self) -> (usize, usize) {
        let t = self.minority_size;
        if self.n_percent < 100 {
            (self.n_percent as usize * t / 100, 1)
        } else {
            (t, self.n_percent as usize / 100)
        }
    }
}

/// A generated sample with the pair and coefficient that produced it.
/// Indices refer to whichever sample list the generator was given.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub features: Vec<f64>,
    pub target: f64,
    pub parent_index: usize,
    pub neighbor_index: usize,
    pub lambda: f64,
}

impl SyntheticSample {
    pub fn into_sample(self) -> Sample {
        Sample {
            features: self.features,
            target: self.target,
            origin: Origin::Synthetic,
            provenance: Some(Provenance {
                parent_index: self.parent_index,
                neighbor_index: self.neighbor_index,
                lambda: self.lambda,
            }),
        }
    }
}

fn lerp(a: f64, b: f64, lambda: f64) -> f64 {
    // clamped so rounding can never leave the segment
    (a + lambda * (b - a)).clamp(a.min(b), a.max(b))
}

/// Moves `lambda` of the way from `parent` to `neighbor`, features and
/// target alike.
pub fn interpolate(
    parent_index: usize,
    parent: &Sample,
    neighbor_index: usize,
    neighbor: &Sample,
    lambda: f64,
) -> Result<SyntheticSample> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::config(format!("lambda = {lambda} outside [0, 1)")));
    }
    check_len(parent.features.len(), neighbor.features.len())?;
    Ok(SyntheticSample {
        features: parent
            .features
            .iter()
            .zip(&neighbor.features)
            .map(|(&x, &n)| lerp(x, n, lambda))
            .collect(),
        target: lerp(parent.target, neighbor.target, lambda),
        parent_index,
        neighbor_index,
        lambda,
    })
}

/// Classical SMOTE over one minority set, seeded from `cfg.seed`.
pub fn smote(minority: &[Sample], cfg: &SmoteConfig) -> Result<Vec<SyntheticSample>> {
    let points: Vec<&[f64]> = minority.iter().map(|s| s.features.as_slice()).collect();
    smote_with_rng(minority, &points, cfg, &mut seed::rng(cfg.seed))
}

/// SMOTE drawing from a caller-owned stream. Neighbors are searched in
/// `points` (the minority features, possibly rescaled), interpolation uses
/// the raw `minority` samples.
pub(crate) fn smote_with_rng<R: Rng>(
    minority: &[Sample],
    points: &[&[f64]],
    cfg: &SmoteConfig,
    rng: &mut R,
) -> Result<Vec<SyntheticSample>> {
    cfg.validate()?;
    check_len(cfg.minority_size, minority.len())?;
    check_len(minority.len(), points.len())?;

    let mut parents: Vec<usize> = (0..minority.len()).collect();
    if cfg.n_percent < 100 {
        parents.shuffle(rng);
    }
    let (retained, per_parent) = cfg.schedule();
    parents.truncate(retained);

    let mut out = Vec::with_capacity(retained * per_parent);
    for &i in &parents {
        let neighbors = knn(points, i, cfg.k)?;
        for _ in 0..per_parent {
            let nn = neighbors[rng.random_range(0..cfg.k)];
            let lambda: f64 = rng.random();
            out.push(interpolate(i, &minority[i], nn, &minority[nn], lambda)?);
        }
    }
    Ok(out)
}
