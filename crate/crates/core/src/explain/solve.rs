//! Weighted ridge least squares through the normal equations.

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Weighted coefficient of determination; `None` when the responses
    /// have no weighted variance.
    pub r2: Option<f64>,
}

/// Minimizes `Σ wᵢ (yᵢ - b - xᵢ·β)² + λ‖β‖²` with the intercept `b`
/// unpenalized. Rows are centered on their weighted mean first, which
/// removes the intercept from the linear system.
pub fn weighted_ridge<X: AsRef<[f64]>>(rows: &[X], responses: &[f64], weights: &[f64], ridge: f64) -> Result<LinearFit> {
    check_len(rows.len(), responses.len())?;
    check_len(rows.len(), weights.len())?;
    let p = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyDataset)?;
    if rows.len() < p + 1 {
        return Err(Error::config(format!("need at least {} rows, got {}", p + 1, rows.len())));
    }
    if ridge.is_nan() || ridge < 0.0 {
        return Err(Error::config("ridge penalty must be non-negative"));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0 || w.is_infinite()) {
        return Err(Error::config("weights must be finite and non-negative"));
    }
    let w_sum: f64 = weights.iter().sum();
    if w_sum <= 0.0 {
        return Err(Error::config("weights are all zero"));
    }

    let mut x_mean = vec![0.0; p];
    let mut y_mean = 0.0;
    for ((row, &y), &w) in rows.iter().zip(responses).zip(weights) {
        let row = row.as_ref();
        check_len(p, row.len())?;
        for (m, v) in x_mean.iter_mut().zip(row) {
            *m += w * v;
        }
        y_mean += w * y;
    }
    x_mean.iter_mut().for_each(|m| *m /= w_sum);
    y_mean /= w_sum;

    // gram = Xcᵀ W Xc + λI, rhs = Xcᵀ W yc
    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    let mut xc = vec![0.0; p];
    for ((row, &y), &w) in rows.iter().zip(responses).zip(weights) {
        for (c, (v, m)) in xc.iter_mut().zip(row.as_ref().iter().zip(&x_mean)) {
            *c = v - m;
        }
        let yc = y - y_mean;
        for i in 0..p {
            rhs[i] += w * xc[i] * yc;
            for j in 0..=i {
                gram[i * p + j] += w * xc[i] * xc[j];
            }
        }
    }
    for i in 0..p {
        gram[i * p + i] += ridge;
        for j in 0..i {
            gram[j * p + i] = gram[i * p + j];
        }
    }
    let coefficients = cholesky_solve(&mut gram, &rhs, p)?;
    let intercept = y_mean - coefficients.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();

    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for ((row, &y), &w) in rows.iter().zip(responses).zip(weights) {
        let fit = intercept + coefficients.iter().zip(row.as_ref()).map(|(b, v)| b * v).sum::<f64>();
        ss_res += w * (y - fit) * (y - fit);
        ss_tot += w * (y - y_mean) * (y - y_mean);
    }
    let scale = w_sum * y_mean * y_mean;
    let r2 = if ss_tot <= 1e-24 * scale || ss_tot == 0.0 {
        None
    } else {
        Some(1.0 - ss_res / ss_tot)
    };
    Ok(LinearFit { intercept, coefficients, r2 })
}

/// Solves `A x = b` for symmetric positive definite `A` (row-major, `n×n`,
/// overwritten by its Cholesky factor).
fn cholesky_solve(a: &mut [f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 || !max_diag.is_finite() {
        return Err(Error::Singular);
    }
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 1e-14 * max_diag {
            return Err(Error::Singular);
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| a[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / a[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / a[i * n + i];
    }
    Ok(x)
}
