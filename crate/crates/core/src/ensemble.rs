//! Risk-aware blending of meta-learners and the baseline combiners:
//! best single model, uniform and inverse-RMSE weighted averaging,
//! fold-wise linear stacking, and greedy hill climbing.

use crate::error::{Error, Result};
use crate::folds::FoldAssignment;
use crate::metrics::{rmse, MetricReport};
use crate::solvers::{nested_cv_fit, Design, FitResult, Grid, PenaltyKind};
use crate::types::{PredictionMatrix, TargetVector};
use serde::Serialize;

/// One meta-learner entering the blend.
#[derive(Debug, Clone)]
pub struct BlendMember {
    pub name: String,
    pub oof: Vec<f64>,
    pub test: Option<Vec<f64>>,
}

/// Inverse-RMSE convex combination of members.
#[derive(Debug, Clone, Serialize)]
pub struct BlendResult {
    pub member_names: Vec<String>,
    pub risks: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(skip)]
    pub final_oof: Vec<f64>,
    #[serde(skip)]
    pub final_test: Option<Vec<f64>>,
}

/// Weights proportional to 1/risk. A zero-risk member would divide by
/// zero, so perfect members short-circuit: weight splits uniformly over
/// them and everything else gets zero.
fn inverse_risk_weights(risks: &[f64]) -> Vec<f64> {
    let perfect: Vec<usize> =
        (0..risks.len()).filter(|&m| risks[m] == 0.0).collect();
    if !perfect.is_empty() {
        let share = 1.0 / perfect.len() as f64;
        let mut w = vec![0.0; risks.len()];
        for m in perfect {
            w[m] = share;
        }
        return w;
    }
    let inv: Vec<f64> = risks.iter().map(|r| 1.0 / r).collect();
    let total: f64 = inv.iter().sum();
    inv.into_iter().map(|v| v / total).collect()
}

pub fn blend(members: &[BlendMember], target: &TargetVector) -> Result<BlendResult> {
    if members.is_empty() {
        return Err(Error::Selection("blend needs at least one member".into()));
    }
    let n = target.len();
    let risks: Vec<f64> = members
        .iter()
        .map(|m| rmse(&m.oof, target.values()))
        .collect::<Result<Vec<f64>>>()?;
    let weights = inverse_risk_weights(&risks);

    let mut final_oof = vec![0.0f64; n];
    for (m, w) in members.iter().zip(&weights) {
        for (acc, v) in final_oof.iter_mut().zip(&m.oof) {
            *acc += w * v;
        }
    }

    let final_test = if members.iter().all(|m| m.test.is_some()) {
        let n_test = members[0].test.as_ref().unwrap().len();
        if members.iter().any(|m| m.test.as_ref().unwrap().len() != n_test) {
            return Err(Error::Dimension("blend members disagree on test length".into()));
        }
        let mut acc = vec![0.0f64; n_test];
        for (m, w) in members.iter().zip(&weights) {
            for (a, v) in acc.iter_mut().zip(m.test.as_ref().unwrap()) {
                *a += w * v;
            }
        }
        Some(acc)
    } else {
        None
    };

    Ok(BlendResult {
        member_names: members.iter().map(|m| m.name.clone()).collect(),
        risks,
        weights,
        final_oof,
        final_test,
    })
}

/// Model with the lowest OOF RMSE; ties broken by name.
pub fn best_single(oof: &PredictionMatrix, target: &TargetVector) -> Result<(String, MetricReport)> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..oof.n_cols() {
        let r = rmse(oof.col(j), target.values())?;
        best = match best {
            None => Some((j, r)),
            Some((bj, br)) => {
                if r < br || (r == br && oof.name(j) < oof.name(bj)) {
                    Some((j, r))
                } else {
                    Some((bj, br))
                }
            }
        };
    }
    let (j, _) = best.expect("prediction matrix is never empty");
    Ok((oof.name(j).to_string(), MetricReport::compute(oof.col(j), target.values())?))
}

/// Row-wise mean over all columns.
pub fn uniform_average(oof: &PredictionMatrix) -> Vec<f64> {
    let k = oof.n_cols() as f64;
    (0..oof.n_rows())
        .map(|i| oof.columns().iter().map(|c| c[i]).sum::<f64>() / k)
        .collect()
}

/// Inverse-RMSE weighted row-wise combination of all columns.
pub fn weighted_average(
    oof: &PredictionMatrix,
    target: &TargetVector,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let risks: Vec<f64> = (0..oof.n_cols())
        .map(|j| rmse(oof.col(j), target.values()))
        .collect::<Result<Vec<f64>>>()?;
    let weights = inverse_risk_weights(&risks);
    let pred = (0..oof.n_rows())
        .map(|i| oof.columns().iter().zip(&weights).map(|(c, w)| w * c[i]).sum::<f64>())
        .collect();
    Ok((weights, pred))
}

/// Fold-wise ridge stacking on the raw prediction columns at a fixed λ
/// (λ = 0 is plain OLS stacking). Uses the same nested machinery with a
/// singleton grid, so selection is a no-op.
pub fn linear_stack(
    oof: &PredictionMatrix,
    target: &TargetVector,
    folds: &FoldAssignment,
    lambda: f64,
) -> Result<FitResult> {
    let design = Design::from(oof);
    let grid = Grid {
        ridge_lambdas: vec![lambda],
        lasso_lambdas: vec![lambda],
        elastic_alphas: vec![0.5],
    };
    nested_cv_fit(&design, target.values(), folds, PenaltyKind::Ridge, &grid, 3, 1e-7, 10_000)
}

/// One accepted hill-climb step.
#[derive(Debug, Clone, Serialize)]
pub struct HillStep {
    pub step: usize,
    pub chosen: String,
    pub rmse: f64,
}

/// State of greedy forward selection with replacement. Implied weights
/// are `counts / total`.
#[derive(Debug, Clone, Serialize)]
pub struct HillClimbState {
    pub counts: Vec<usize>,
    #[serde(skip)]
    pub current_pred: Vec<f64>,
    pub current_rmse: f64,
    pub history: Vec<HillStep>,
}

/// Greedy forward selection with replacement, starting from the best
/// single model. Each step adds the model (repeats allowed) whose
/// inclusion in the count-weighted average lowers OOF RMSE the most;
/// only strict improvements are accepted, so the recorded RMSE is
/// nonincreasing. Stops at `max_steps` total selections or after
/// `patience` consecutive non-improving steps.
pub fn hill_climb(
    oof: &PredictionMatrix,
    target: &TargetVector,
    max_steps: usize,
    patience: usize,
) -> Result<HillClimbState> {
    if max_steps == 0 {
        return Err(Error::Config("max_steps must be at least 1".into()));
    }
    if oof.n_rows() != target.len() {
        return Err(Error::Dimension(format!(
            "pool has {} rows, target has {}",
            oof.n_rows(),
            target.len()
        )));
    }
    let k = oof.n_cols();
    let n = oof.n_rows();

    let (best_name, best_metrics) = best_single(oof, target)?;
    let best_idx = oof.names().iter().position(|nm| *nm == best_name).unwrap();

    let mut counts = vec![0usize; k];
    counts[best_idx] = 1;
    let mut sum_pred: Vec<f64> = oof.col(best_idx).to_vec();
    let mut total = 1usize;
    let mut current_rmse = best_metrics.rmse;
    let mut history =
        vec![HillStep { step: 0, chosen: best_name, rmse: current_rmse }];

    let mut non_improving = 0usize;
    while history.len() < max_steps && non_improving < patience {
        // best candidate addition: lowest resulting rmse, name tie-break
        let mut best_cand: Option<(usize, f64)> = None;
        let denom = (total + 1) as f64;
        for j in 0..k {
            let mut sse = 0.0;
            let col = oof.col(j);
            for i in 0..n {
                let p = (sum_pred[i] + col[i]) / denom;
                let e = p - target.values()[i];
                sse += e * e;
            }
            let r = (sse / n as f64).sqrt();
            best_cand = match best_cand {
                None => Some((j, r)),
                Some((bj, br)) => {
                    if r < br || (r == br && oof.name(j) < oof.name(bj)) {
                        Some((j, r))
                    } else {
                        Some((bj, br))
                    }
                }
            };
        }
        let (j, r) = best_cand.unwrap();
        if r < current_rmse {
            counts[j] += 1;
            total += 1;
            for (s, v) in sum_pred.iter_mut().zip(oof.col(j)) {
                *s += v;
            }
            current_rmse = r;
            history.push(HillStep { step: history.len(), chosen: oof.name(j).to_string(), rmse: r });
            non_improving = 0;
        } else {
            // the state is frozen, so further evaluations cannot change
            non_improving += 1;
        }
    }

    let current_pred = sum_pred.iter().map(|s| s / total as f64).collect();
    Ok(HillClimbState { counts, current_pred, current_rmse, history })
}
