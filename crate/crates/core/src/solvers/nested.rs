//! Nested cross-validated hyperparameter selection.
//!
//! Outer folds produce honest OOF meta-predictions; an inner round-robin
//! split of each outer-train set selects the penalty strength by mean
//! inner-fold RMSE. The standardizer is fit once per outer fold on
//! outer-train rows only, so outer-validation rows never touch any
//! statistic used to fit.

use crate::error::{Error, Result};
use crate::folds::FoldAssignment;
use crate::metrics::rmse;
use crate::solvers::cd::CdSystem;
use crate::solvers::ridge::RidgeSystem;
use crate::solvers::{Design, Grid, PenaltyKind, PenaltySpec, Standardizer};

/// Per-outer-fold refit artifacts.
#[derive(Debug, Clone)]
pub struct FoldFit {
    pub fold: usize,
    pub penalty: PenaltySpec,
    /// Weights in the fold's standardized feature space.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub standardizer: Standardizer,
    /// Mean inner-fold RMSE of the selected candidate.
    pub inner_rmse: f64,
}

/// One grid candidate's inner-CV score at every outer fold.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub alpha: f64,
    pub lambda: f64,
    pub fold_rmse: Vec<f64>,
}

/// Assembled nested-CV result for one meta-learner.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub kind: PenaltyKind,
    pub feature_names: Vec<String>,
    /// Leakage-free predictions, one per training row.
    pub oof_pred: Vec<f64>,
    pub per_fold_rmse: Vec<f64>,
    pub fold_fits: Vec<FoldFit>,
    /// Mean weights across outer folds (standardized space).
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Mean fraction of exactly-zero weights across fold refits.
    pub sparsity: f64,
    pub fit_calls: u64,
    pub n_unconverged: u64,
    pub path: Vec<PathPoint>,
}

impl FitResult {
    /// OOF RMSE over all rows.
    pub fn oof_rmse(&self, y: &[f64]) -> Result<f64> {
        rmse(&self.oof_pred, y)
    }

    /// Fold-averaged prediction on new rows (each fold's model applied
    /// through its own standardizer, then averaged).
    pub fn predict(&self, cols: &[Vec<f64>]) -> Result<Vec<f64>> {
        if cols.len() != self.weights.len() {
            return Err(Error::Dimension(format!(
                "prediction needs {} columns, got {}",
                self.weights.len(),
                cols.len()
            )));
        }
        let n = cols.first().map_or(0, |c| c.len());
        let rows: Vec<usize> = (0..n).collect();
        let mut sum = vec![0.0f64; n];
        for ff in &self.fold_fits {
            let p = ff.standardizer.predict_rows(cols, &rows, &ff.weights, ff.intercept);
            for (s, v) in sum.iter_mut().zip(p) {
                *s += v;
            }
        }
        let l = self.fold_fits.len() as f64;
        Ok(sum.into_iter().map(|s| s / l).collect())
    }
}

/// Either solver behind a shared fit interface; ridge ignores warm starts.
enum Fitter {
    Ridge(RidgeSystem),
    Cd(CdSystem),
}

impl Fitter {
    fn build(kind: PenaltyKind, cols: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        Ok(match kind {
            PenaltyKind::Ridge => Fitter::Ridge(RidgeSystem::build(cols, y)?),
            _ => Fitter::Cd(CdSystem::build(cols, y)?),
        })
    }

    /// Returns (weights, intercept, converged).
    fn fit(
        &self,
        cand: &PenaltySpec,
        cd_tol: f64,
        cd_max_iter: usize,
        warm: Option<&[f64]>,
    ) -> Result<(Vec<f64>, f64, bool)> {
        match self {
            Fitter::Ridge(sys) => {
                let f = sys.solve(cand.lambda)?;
                Ok((f.weights, f.intercept, true))
            }
            Fitter::Cd(sys) => {
                let f = sys.solve(cand, cd_tol, cd_max_iter, warm)?;
                Ok((f.weights, f.intercept, f.converged))
            }
        }
    }
}

/// Candidate indices grouped for warm-start chains: within each α group
/// the λ path runs from largest to smallest.
fn fit_groups(candidates: &[PenaltySpec]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        match groups.iter_mut().find(|(a, _)| *a == c.alpha) {
            Some((_, v)) => v.push(i),
            None => groups.push((c.alpha, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, mut v)| {
            v.sort_by(|&a, &b| candidates[b].lambda.partial_cmp(&candidates[a].lambda).unwrap());
            v
        })
        .collect()
}

pub fn nested_cv_fit(
    design: &Design,
    y: &[f64],
    folds: &FoldAssignment,
    kind: PenaltyKind,
    grid: &Grid,
    inner_folds: usize,
    cd_tol: f64,
    cd_max_iter: usize,
) -> Result<FitResult> {
    let n = y.len();
    if design.n_rows() != n || folds.len() != n {
        return Err(Error::Dimension(format!(
            "design has {} rows, target {}, folds {}",
            design.n_rows(),
            n,
            folds.len()
        )));
    }
    if design.width() == 0 {
        return Err(Error::Selection("empty design matrix".into()));
    }
    if inner_folds < 2 {
        return Err(Error::Partition(format!("need at least 2 inner folds, got {inner_folds}")));
    }
    let candidates = grid.candidates(kind);
    if candidates.is_empty() {
        return Err(Error::Config("empty hyperparameter grid".into()));
    }
    for c in &candidates {
        c.validate()?;
    }
    let groups = fit_groups(&candidates);

    let l = folds.n_folds();
    let d = design.width();
    let mut oof_pred = vec![0.0f64; n];
    let mut per_fold_rmse = Vec::with_capacity(l);
    let mut fold_fits: Vec<FoldFit> = Vec::with_capacity(l);
    let mut fit_calls: u64 = 0;
    let mut n_unconverged: u64 = 0;
    let mut path_scores = vec![vec![0.0f64; l]; candidates.len()];

    for fold in 0..l {
        let stage = |e: Error| e.in_stage(&format!("outer fold {fold}"));
        let train_idx = folds.train_indices(fold);
        let val_idx = folds.validation_indices(fold);
        let n_tr = train_idx.len();
        if n_tr < inner_folds {
            return Err(Error::Partition(format!(
                "outer fold {fold} leaves {n_tr} training rows for {inner_folds} inner folds"
            )));
        }

        let standardizer = Standardizer::fit(&design.cols, &train_idx);
        let xtr = standardizer.transform(&design.cols, &train_idx);
        let ytr: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();

        // inner round-robin over outer-train positions
        let mut scores = vec![vec![0.0f64; inner_folds]; candidates.len()];
        for inner in 0..inner_folds {
            let itr: Vec<usize> = (0..n_tr).filter(|p| p % inner_folds != inner).collect();
            let ival: Vec<usize> = (0..n_tr).filter(|p| p % inner_folds == inner).collect();
            let icols: Vec<Vec<f64>> =
                xtr.iter().map(|c| itr.iter().map(|&p| c[p]).collect()).collect();
            let iy: Vec<f64> = itr.iter().map(|&p| ytr[p]).collect();
            let yval: Vec<f64> = ival.iter().map(|&p| ytr[p]).collect();

            let fitter = Fitter::build(kind, &icols, &iy).map_err(stage)?;
            for group in &groups {
                let mut warm: Option<Vec<f64>> = None;
                for &ci in group {
                    let (w, b, converged) = fitter
                        .fit(&candidates[ci], cd_tol, cd_max_iter, warm.as_deref())
                        .map_err(stage)?;
                    fit_calls += 1;
                    if !converged {
                        n_unconverged += 1;
                    }
                    let preds: Vec<f64> = ival
                        .iter()
                        .map(|&p| b + xtr.iter().zip(&w).map(|(c, wj)| c[p] * wj).sum::<f64>())
                        .collect();
                    scores[ci][inner] = rmse(&preds, &yval).map_err(stage)?;
                    warm = Some(w);
                }
            }
        }

        let mean_scores: Vec<f64> = scores
            .iter()
            .map(|s| s.iter().sum::<f64>() / inner_folds as f64)
            .collect();
        for (ci, &m) in mean_scores.iter().enumerate() {
            path_scores[ci][fold] = m;
        }

        // argmin with (score, lambda, alpha) tie-break, independent of
        // candidate iteration order
        let mut best = 0usize;
        for ci in 1..candidates.len() {
            let a = (mean_scores[ci], candidates[ci].lambda, candidates[ci].alpha);
            let b = (mean_scores[best], candidates[best].lambda, candidates[best].alpha);
            if a.0 < b.0
                || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
            {
                best = ci;
            }
        }
        let chosen = candidates[best];

        // refit on the full outer-train set
        let fitter = Fitter::build(kind, &xtr, &ytr).map_err(stage)?;
        let (weights, intercept, converged) =
            fitter.fit(&chosen, cd_tol, cd_max_iter, None).map_err(stage)?;
        fit_calls += 1;
        if !converged {
            n_unconverged += 1;
        }

        let val_pred = standardizer.predict_rows(&design.cols, &val_idx, &weights, intercept);
        let yval: Vec<f64> = val_idx.iter().map(|&i| y[i]).collect();
        per_fold_rmse.push(rmse(&val_pred, &yval).map_err(stage)?);
        for (&i, p) in val_idx.iter().zip(&val_pred) {
            oof_pred[i] = *p;
        }

        fold_fits.push(FoldFit {
            fold,
            penalty: chosen,
            weights,
            intercept,
            standardizer,
            inner_rmse: mean_scores[best],
        });
    }

    let mut weights = vec![0.0f64; d];
    let mut intercept = 0.0f64;
    let mut zero_frac = 0.0f64;
    for ff in &fold_fits {
        for (w, fw) in weights.iter_mut().zip(&ff.weights) {
            *w += fw / l as f64;
        }
        intercept += ff.intercept / l as f64;
        zero_frac += ff.weights.iter().filter(|&&w| w == 0.0).count() as f64
            / (d as f64 * l as f64);
    }

    let path = candidates
        .iter()
        .zip(path_scores)
        .map(|(c, fold_rmse)| PathPoint { alpha: c.alpha, lambda: c.lambda, fold_rmse })
        .collect();

    Ok(FitResult {
        kind,
        feature_names: design.names.clone(),
        oof_pred,
        per_fold_rmse,
        fold_fits,
        weights,
        intercept,
        sparsity: zero_frac,
        fit_calls,
        n_unconverged,
        path,
    })
}
