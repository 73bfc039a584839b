use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// MAE, MSE and R² for one evaluation. `r2` is `None` when the targets have
/// no variance and the coefficient is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub mse: f64,
    pub r2: Option<f64>,
}

impl Metrics {
    pub fn is_finite(&self) -> bool {
        self.mae.is_finite() && self.mse.is_finite() && self.r2.is_none_or(f64::is_finite)
    }
}

/// Fails when `mae² ≤ mse` does not hold (up to rounding).
pub fn check_power_mean(m: &Metrics) -> Result<()> {
    if m.mae * m.mae <= m.mse * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::Invariant(format!("mae² = {} exceeds mse = {}", m.mae * m.mae, m.mse)))
    }
}

pub fn compute_metrics(predictions: &[f64], targets: &[f64]) -> Result<Metrics> {
    check_len(targets.len(), predictions.len())?;
    if targets.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = targets.len() as f64;
    let mut abs = 0.0;
    let mut sq = 0.0;
    for (p, y) in predictions.iter().zip(targets) {
        let e = p - y;
        abs += e.abs();
        sq += e * e;
    }
    let mean = targets.iter().sum::<f64>() / n;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    let scale: f64 = targets.iter().map(|y| y * y).sum();
    let r2 = if ss_tot <= 1e-20 * scale || ss_tot == 0.0 {
        None
    } else {
        Some(1.0 - sq / ss_tot)
    };
    let m = Metrics {
        mae: abs / n,
        mse: sq / n,
        r2,
    };
    check_power_mean(&m)?;
    Ok(m)
}
