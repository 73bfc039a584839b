use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{check_len, Error, Result};

/// Columns whose population std falls below this are left unscaled (std = 1).
pub const MIN_STD: f64 = 1e-12;

/// Per-column z-scoring with population statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    pub fn from_parts(means: Vec<f64>, stds: Vec<f64>) -> Result<Self> {
        check_len(means.len(), stds.len())?;
        if stds.iter().any(|&s| !(s > 0.0 && s.is_finite())) || means.iter().any(|m| !m.is_finite()) {
            return Err(Error::config("standardizer needs finite means and positive stds"));
        }
        Ok(Standardizer { means, stds })
    }

    /// Fits one mean/std pair per column over equally long rows.
    pub fn fit_rows<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let width = first.len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; width];
        for row in &rows {
            check_len(width, row.len())?;
            for (m, v) in means.iter_mut().zip(row.iter()) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; width];
        for row in &rows {
            for ((acc, v), m) in vars.iter_mut().zip(row.iter()).zip(&means) {
                *acc += (v - m) * (v - m);
            }
        }
        let stds = vars
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s < MIN_STD {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Ok(Standardizer { means, stds })
    }

    pub fn fit_values(values: &[f64]) -> Result<Self> {
        Self::fit_rows(values.iter().map(std::slice::from_ref))
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), row.len())?;
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }

    pub fn inverse_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), row.len())?;
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(z, (m, s))| z * s + m)
            .collect())
    }

    pub fn transform_value(&self, column: usize, v: f64) -> f64 {
        (v - self.means[column]) / self.stds[column]
    }

    pub fn inverse_value(&self, column: usize, z: f64) -> f64 {
        z * self.stds[column] + self.means[column]
    }

    /// Applies to the features, and to the target too when the standardizer
    /// has one more column than the dataset has features.
    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        self.map_dataset(data, |s, c, v| s.transform_value(c, v))
    }

    pub fn inverse_transform(&self, data: &Dataset) -> Result<Dataset> {
        self.map_dataset(data, |s, c, v| s.inverse_value(c, v))
    }

    fn map_dataset(&self, data: &Dataset, f: impl Fn(&Self, usize, f64) -> f64) -> Result<Dataset> {
        let nf = data.n_features();
        let with_target = match self.len() {
            l if l == nf => false,
            l if l == nf + 1 => true,
            l => return Err(Error::DimensionMismatch { expected: nf, found: l }),
        };
        let samples = data
            .samples()
            .iter()
            .map(|s| {
                let mut out = s.clone();
                for (c, v) in out.features.iter_mut().enumerate() {
                    *v = f(self, c, *v);
                }
                if with_target {
                    out.target = f(self, nf, out.target);
                }
                out
            })
            .collect();
        data.with_samples(samples)
    }
}

/// Fits on the feature columns, plus the target as a trailing column when
/// `include_target` is set.
pub fn fit_standardizer(data: &Dataset, include_target: bool) -> Result<Standardizer> {
    if include_target {
        let rows: Vec<Vec<f64>> = data
            .samples()
            .iter()
            .map(|s| {
                let mut r = s.features.clone();
                r.push(s.target);
                r
            })
            .collect();
        Standardizer::fit_rows(rows.iter().map(Vec::as_slice))
    } else {
        Standardizer::fit_rows(data.features())
    }
}
