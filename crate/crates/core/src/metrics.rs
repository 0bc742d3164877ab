//! Regression evaluation metrics: RMSE, MAE, R², and Pearson correlation.

use crate::error::{Error, Result};
use serde::Serialize;

fn check_pair(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::Dimension(format!(
            "prediction has {} entries, target has {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Dimension("metric inputs must be nonempty".into()));
    }
    for (i, (&p, &t)) in pred.iter().zip(target).enumerate() {
        if !p.is_finite() || !t.is_finite() {
            return Err(Error::NonFinite(format!("metric input at index {i}")));
        }
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_pair(pred, target)?;
    let n = pred.len() as f64;
    let sse: f64 = pred.iter().zip(target).map(|(&p, &t)| (p - t) * (p - t)).sum();
    Ok((sse / n).sqrt())
}

/// Mean absolute error.
pub fn mae(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_pair(pred, target)?;
    let n = pred.len() as f64;
    let sad: f64 = pred.iter().zip(target).map(|(&p, &t)| (p - t).abs()).sum();
    Ok(sad / n)
}

/// Coefficient of determination, 1 − SSE/SST. May be negative; at most 1.
pub fn r_squared(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_pair(pred, target)?;
    let n = target.len() as f64;
    let mean = target.iter().sum::<f64>() / n;
    let sst: f64 = target.iter().map(|&t| (t - mean) * (t - mean)).sum();
    if sst == 0.0 {
        return Err(Error::Degenerate("constant target has zero variance".into()));
    }
    let sse: f64 = pred.iter().zip(target).map(|(&p, &t)| (p - t) * (p - t)).sum();
    Ok(1.0 - sse / sst)
}

/// Pearson correlation between two nonconstant vectors, clamped to [−1, 1].
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let da = x - mean_a;
        let db = y - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::Degenerate("pearson undefined for a constant vector".into()));
    }
    Ok((cov / (var_a.sqrt() * var_b.sqrt())).clamp(-1.0, 1.0))
}

/// The four metrics reported for every method.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricReport {
    pub rmse: f64,
    pub mae: f64,
    pub r_squared: f64,
    pub pearson: f64,
}

impl MetricReport {
    pub fn compute(pred: &[f64], target: &[f64]) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pred, target)?,
            mae: mae(pred, target)?,
            r_squared: r_squared(pred, target)?,
            pearson: pearson(pred, target)?,
        })
    }
}
