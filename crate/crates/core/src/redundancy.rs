//! Prediction-space redundancy projection, variance pruning, and spectral
//! conditioning diagnostics.
//!
//! Models are processed in ascending OOF RMSE (ties broken by name). A
//! candidate is suppressed when some already-retained model is both highly
//! correlated with it and prediction-wise indistinguishable from it, so
//! only strictly-worse near-duplicates are dropped. The removal log keeps
//! full provenance (who suppressed whom, at what correlation and error
//! gap).

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::metrics::{pearson, rmse};
use crate::types::{PredictionMatrix, TargetVector};
use serde::Serialize;

/// Thresholds for the joint suppression rule and variance pruning.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RedundancyConfig {
    /// Minimum pairwise correlation for suppression.
    pub tau_corr: f64,
    /// Maximum pairwise MSE for suppression.
    pub tau_mse: f64,
    /// Columns with variance at or below this are pruned.
    pub tau_var: f64,
}

impl RedundancyConfig {
    pub fn new(tau_corr: f64, tau_mse: f64, tau_var: f64) -> Result<Self> {
        if !(tau_corr > 0.0 && tau_corr <= 1.0) {
            return Err(Error::Config(format!("tau_corr must be in (0, 1], got {tau_corr}")));
        }
        if tau_mse < 0.0 || !tau_mse.is_finite() && tau_mse != f64::INFINITY {
            return Err(Error::Config(format!("tau_mse must be nonnegative, got {tau_mse}")));
        }
        if !(tau_var >= 0.0) {
            return Err(Error::Config(format!("tau_var must be nonnegative, got {tau_var}")));
        }
        Ok(Self { tau_corr, tau_mse, tau_var })
    }

    /// Defaults with the MSE threshold scaled to the target: an absolute
    /// threshold is meaningless across target scales, so the default is
    /// 0.05 · Var(target). Set `tau_mse` to infinity to recover
    /// correlation-only de-duplication.
    pub fn default_for_target(target: &TargetVector) -> Self {
        Self { tau_corr: 0.95, tau_mse: 0.05 * target.variance(), tau_var: 0.01 }
    }
}

/// One suppressed model and the retained model that suppressed it.
#[derive(Debug, Clone, Serialize)]
pub struct Removal {
    pub removed: String,
    pub kept: String,
    pub rho: f64,
    pub mse_between: f64,
    /// How much worse the removed model's OOF RMSE is than the kept one's.
    pub delta_rmse: f64,
}

/// Spectral summary of a model-correlation matrix.
#[derive(Debug, Clone, Serialize)]
pub struct ConditioningStats {
    /// Ratio of largest to smallest singular value.
    pub kappa: f64,
    /// Trace over largest singular value, in (0, K].
    pub eff_rank: f64,
    /// Full spectrum, descending.
    pub spectrum: Vec<f64>,
}

/// Outcome of the projection: retained set, removal log, and conditioning
/// before/after.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    /// Column indices into the input matrix, in processing order
    /// (ascending OOF RMSE, ties by name).
    pub retained: Vec<usize>,
    pub retained_names: Vec<String>,
    pub removals: Vec<Removal>,
    pub k_eff: usize,
    pub before: ConditioningStats,
    pub after: ConditioningStats,
}

/// Removes columns whose variance is at or below `tau_var`.
pub fn variance_prune(
    oof: &PredictionMatrix,
    tau_var: f64,
) -> Result<(PredictionMatrix, Vec<String>)> {
    if tau_var < 0.0 {
        return Err(Error::Config(format!("tau_var must be nonnegative, got {tau_var}")));
    }
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for j in 0..oof.n_cols() {
        if oof.col_variance(j) > tau_var {
            keep.push(j);
        } else {
            removed.push(oof.name(j).to_string());
        }
    }
    if keep.is_empty() {
        return Err(Error::Selection("variance pruning removed every column".into()));
    }
    Ok((oof.select(&keep)?, removed))
}

/// Correlation matrix of the pool's columns.
fn correlation_matrix(oof: &PredictionMatrix) -> Result<Vec<Vec<f64>>> {
    let k = oof.n_cols();
    let mut c = vec![vec![1.0f64; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let r = pearson(oof.col(a), oof.col(b))?;
            c[a][b] = r;
            c[b][a] = r;
        }
    }
    Ok(c)
}

fn conditioning_stats(oof: &PredictionMatrix) -> Result<ConditioningStats> {
    let k = oof.n_cols();
    if k == 1 {
        // a single column has the trivial 1×1 correlation matrix
        return Ok(ConditioningStats { kappa: 1.0, eff_rank: 1.0, spectrum: vec![1.0] });
    }
    let c = correlation_matrix(oof)?;
    let mut spectrum = symmetric_eigenvalues(&c)?;
    for v in spectrum.iter_mut() {
        // correlation matrices are PSD; clamp numerical negatives
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sigma_max = spectrum[0];
    let sigma_min = *spectrum.last().unwrap();
    let kappa = if sigma_min > 0.0 { sigma_max / sigma_min } else { f64::INFINITY };
    Ok(ConditioningStats { kappa, eff_rank: k as f64 / sigma_max, spectrum })
}

/// Conditioning diagnostics for a pool of at least two nonconstant columns.
pub fn conditioning(oof: &PredictionMatrix) -> Result<ConditioningStats> {
    if oof.n_cols() < 2 {
        return Err(Error::Dimension(format!(
            "conditioning needs at least 2 columns, got {}",
            oof.n_cols()
        )));
    }
    for j in 0..oof.n_cols() {
        if oof.col_variance(j) == 0.0 {
            return Err(Error::Degenerate(format!(
                "column '{}' is constant; prune before computing conditioning",
                oof.name(j)
            )));
        }
    }
    conditioning_stats(oof)
}

/// Joint correlation/MSE redundancy projection.
pub fn project(
    oof: &PredictionMatrix,
    target: &TargetVector,
    cfg: &RedundancyConfig,
) -> Result<SelectionResult> {
    if oof.n_rows() != target.len() {
        return Err(Error::Dimension(format!(
            "pool has {} rows, target has {}",
            oof.n_rows(),
            target.len()
        )));
    }
    for j in 0..oof.n_cols() {
        if oof.col_variance(j) == 0.0 {
            return Err(Error::Degenerate(format!(
                "column '{}' is constant; apply variance pruning first",
                oof.name(j)
            )));
        }
    }

    let k = oof.n_cols();
    let risks: Vec<f64> = (0..k)
        .map(|j| rmse(oof.col(j), target.values()))
        .collect::<Result<Vec<f64>>>()?;

    // processing order: ascending risk, name as tie-break
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        risks[a].partial_cmp(&risks[b]).unwrap().then_with(|| oof.name(a).cmp(oof.name(b)))
    });

    let before = conditioning_stats(oof)?;

    let mut retained: Vec<usize> = Vec::new();
    let mut removals: Vec<Removal> = Vec::new();
    for &cand in &order {
        let mut suppressor: Option<(usize, f64, f64)> = None;
        for &kept in &retained {
            let rho = pearson(oof.col(cand), oof.col(kept))?;
            if rho >= cfg.tau_corr {
                let n = oof.n_rows() as f64;
                let mse: f64 = oof
                    .col(cand)
                    .iter()
                    .zip(oof.col(kept))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / n;
                if mse <= cfg.tau_mse {
                    suppressor = Some((kept, rho, mse));
                    break;
                }
            }
        }
        match suppressor {
            Some((kept, rho, mse)) => removals.push(Removal {
                removed: oof.name(cand).to_string(),
                kept: oof.name(kept).to_string(),
                rho,
                mse_between: mse,
                delta_rmse: risks[cand] - risks[kept],
            }),
            None => retained.push(cand),
        }
    }

    let after = conditioning_stats(&oof.select(&retained)?)?;
    let retained_names = retained.iter().map(|&j| oof.name(j).to_string()).collect();
    Ok(SelectionResult {
        k_eff: retained.len(),
        retained,
        retained_names,
        removals,
        before,
        after,
    })
}
