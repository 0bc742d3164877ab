//! Leakage-free out-of-fold prediction construction over a pluggable
//! base-predictor interface.
//!
//! For each fold, every predictor is trained on the remaining folds and
//! its predictions fill exactly that fold's rows of its column, so no
//! OOF value ever comes from a model that saw the row's target. A small
//! built-in predictor set keeps tests self-contained; external pools are
//! ingested as CSV by the CLI instead.

use crate::error::{Error, Result};
use crate::folds::FoldAssignment;
use crate::metrics::rmse;
use crate::seeding;
use crate::solvers::ridge::fit_ridge;
use crate::types::{FeatureMatrix, PredictionMatrix, TargetVector};

/// An unfitted base model.
pub trait BasePredictor: Send + Sync {
    fn name(&self) -> &str;
    /// Trains on the given rows. `seed` is derived per (fold, model) so
    /// stochastic predictors stay deterministic and schedule-independent.
    fn fit(&self, features: &FeatureMatrix, targets: &[f64], seed: u64) -> Result<Box<dyn FittedModel>>;
}

/// A trained base model.
pub trait FittedModel: Send + Sync {
    fn predict(&self, features: &FeatureMatrix) -> Vec<f64>;
}

/// OOF predictions plus optional full-refit test predictions.
#[derive(Debug, Clone)]
pub struct OofBundle {
    pub oof: PredictionMatrix,
    pub test: Option<PredictionMatrix>,
    pub per_model_rmse: Vec<f64>,
}

/// Builds the N×K OOF matrix. When `test_features` is given, each
/// predictor is refit once on the full training set to produce its test
/// column.
pub fn build_oof(
    features: &FeatureMatrix,
    target: &TargetVector,
    predictors: &[Box<dyn BasePredictor>],
    folds: &FoldAssignment,
    seed: u64,
    test_features: Option<&FeatureMatrix>,
) -> Result<OofBundle> {
    let n = target.len();
    if features.n_rows() != n {
        return Err(Error::Dimension(format!(
            "features have {} rows, target has {n}",
            features.n_rows()
        )));
    }
    if folds.len() != n {
        return Err(Error::Dimension(format!("folds cover {} rows, target has {n}", folds.len())));
    }
    if predictors.is_empty() {
        return Err(Error::Selection("predictor pool is empty".into()));
    }

    let k = predictors.len();
    let mut cols = vec![vec![f64::NAN; n]; k];
    for fold in 0..folds.n_folds() {
        let train_idx = folds.train_indices(fold);
        let val_idx = folds.validation_indices(fold);
        let train_x = features.subset(&train_idx);
        let train_y: Vec<f64> = train_idx.iter().map(|&i| target.values()[i]).collect();
        let val_x = features.subset(&val_idx);
        for (m, predictor) in predictors.iter().enumerate() {
            let fit_seed = seeding::derive(seed, &[fold as u64, m as u64]);
            let fitted = predictor.fit(&train_x, &train_y, fit_seed).map_err(|e| Error::Predictor {
                model: predictor.name().to_string(),
                fold,
                source: Box::new(e),
            })?;
            let preds = fitted.predict(&val_x);
            if preds.len() != val_idx.len() {
                return Err(Error::Predictor {
                    model: predictor.name().to_string(),
                    fold,
                    source: Box::new(Error::Dimension(format!(
                        "predicted {} values for {} rows",
                        preds.len(),
                        val_idx.len()
                    ))),
                });
            }
            for (p, &row) in preds.iter().zip(&val_idx) {
                cols[m][row] = *p;
            }
        }
    }

    let oof = PredictionMatrix::new(
        predictors.iter().zip(cols).map(|(p, c)| (p.name().to_string(), c)).collect(),
    )?;
    let per_model_rmse = (0..k)
        .map(|m| rmse(oof.col(m), target.values()))
        .collect::<Result<Vec<f64>>>()?;

    let test = match test_features {
        None => None,
        Some(tf) => {
            let mut test_cols = Vec::with_capacity(k);
            for (m, predictor) in predictors.iter().enumerate() {
                let fit_seed = seeding::derive(seed, &[u64::MAX, m as u64]);
                let fitted =
                    predictor.fit(features, target.values(), fit_seed).map_err(|e| Error::Predictor {
                        model: predictor.name().to_string(),
                        fold: folds.n_folds(),
                        source: Box::new(e),
                    })?;
                test_cols.push((predictor.name().to_string(), fitted.predict(tf)));
            }
            Some(PredictionMatrix::new(test_cols)?)
        }
    };

    Ok(OofBundle { oof, test, per_model_rmse })
}

// ---------------------------------------------------------------------------
// built-in predictors
// ---------------------------------------------------------------------------

/// Predicts the training-target mean everywhere.
pub struct ConstantMean;

struct FittedConstant {
    mean: f64,
}

impl BasePredictor for ConstantMean {
    fn name(&self) -> &str {
        "constant_mean"
    }
    fn fit(&self, _features: &FeatureMatrix, targets: &[f64], _seed: u64) -> Result<Box<dyn FittedModel>> {
        if targets.is_empty() {
            return Err(Error::Dimension("cannot fit on zero samples".into()));
        }
        Ok(Box::new(FittedConstant { mean: targets.iter().sum::<f64>() / targets.len() as f64 }))
    }
}

impl FittedModel for FittedConstant {
    fn predict(&self, features: &FeatureMatrix) -> Vec<f64> {
        vec![self.mean; features.n_rows()]
    }
}

/// Simple least squares on a single feature column.
pub struct UnivariateLs {
    pub feature: usize,
    name: String,
}

impl UnivariateLs {
    pub fn new(feature: usize) -> Self {
        Self { feature, name: format!("uni_ls_{feature}") }
    }
}

struct FittedUnivariate {
    feature: usize,
    slope: f64,
    intercept: f64,
}

impl BasePredictor for UnivariateLs {
    fn name(&self) -> &str {
        &self.name
    }
    fn fit(&self, features: &FeatureMatrix, targets: &[f64], _seed: u64) -> Result<Box<dyn FittedModel>> {
        if self.feature >= features.n_cols() {
            return Err(Error::Dimension(format!(
                "feature {} out of range ({} columns)",
                self.feature,
                features.n_cols()
            )));
        }
        let x = features.col(self.feature);
        let n = x.len() as f64;
        let xm = x.iter().sum::<f64>() / n;
        let ym = targets.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut var = 0.0;
        for (&xi, &yi) in x.iter().zip(targets) {
            cov += (xi - xm) * (yi - ym);
            var += (xi - xm) * (xi - xm);
        }
        let slope = if var > 0.0 { cov / var } else { 0.0 };
        Ok(Box::new(FittedUnivariate { feature: self.feature, slope, intercept: ym - slope * xm }))
    }
}

impl FittedModel for FittedUnivariate {
    fn predict(&self, features: &FeatureMatrix) -> Vec<f64> {
        (0..features.n_rows())
            .map(|i| self.intercept + self.slope * features.row(i)[self.feature])
            .collect()
    }
}

/// Ridge regression on all features at a fixed penalty.
pub struct FixedRidge {
    pub lambda: f64,
    name: String,
}

impl FixedRidge {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, name: format!("ridge_lam{lambda}") }
    }
}

struct FittedLinear {
    weights: Vec<f64>,
    intercept: f64,
}

impl BasePredictor for FixedRidge {
    fn name(&self) -> &str {
        &self.name
    }
    fn fit(&self, features: &FeatureMatrix, targets: &[f64], _seed: u64) -> Result<Box<dyn FittedModel>> {
        let cols: Vec<Vec<f64>> = (0..features.n_cols()).map(|j| features.col(j)).collect();
        let fit = fit_ridge(&cols, targets, self.lambda)?;
        Ok(Box::new(FittedLinear { weights: fit.weights, intercept: fit.intercept }))
    }
}

impl FittedModel for FittedLinear {
    fn predict(&self, features: &FeatureMatrix) -> Vec<f64> {
        (0..features.n_rows())
            .map(|i| {
                self.intercept
                    + features.row(i).iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>()
            })
            .collect()
    }
}

/// Mean target of the k nearest training rows (Euclidean distance,
/// ties broken by row index).
pub struct KnnMean {
    pub k: usize,
    name: String,
}

impl KnnMean {
    pub fn new(k: usize) -> Self {
        Self { k, name: format!("knn{k}") }
    }
}

struct FittedKnn {
    k: usize,
    train: FeatureMatrix,
    targets: Vec<f64>,
}

impl BasePredictor for KnnMean {
    fn name(&self) -> &str {
        &self.name
    }
    fn fit(&self, features: &FeatureMatrix, targets: &[f64], _seed: u64) -> Result<Box<dyn FittedModel>> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        Ok(Box::new(FittedKnn {
            k: self.k.min(targets.len()),
            train: features.clone(),
            targets: targets.to_vec(),
        }))
    }
}

impl FittedModel for FittedKnn {
    fn predict(&self, features: &FeatureMatrix) -> Vec<f64> {
        (0..features.n_rows())
            .map(|i| {
                let q = features.row(i);
                let mut dist: Vec<(f64, usize)> = (0..self.train.n_rows())
                    .map(|r| {
                        let d: f64 = self
                            .train
                            .row(r)
                            .iter()
                            .zip(q)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        (d, r)
                    })
                    .collect();
                dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                dist[..self.k].iter().map(|&(_, r)| self.targets[r]).sum::<f64>() / self.k as f64
            })
            .collect()
    }
}

/// Test helper: returns a fixed constant regardless of training data.
pub struct ConstantValue {
    pub value: f64,
    name: String,
}

impl ConstantValue {
    pub fn new(value: f64, name: impl Into<String>) -> Self {
        Self { value, name: name.into() }
    }
}

impl BasePredictor for ConstantValue {
    fn name(&self) -> &str {
        &self.name
    }
    fn fit(&self, _f: &FeatureMatrix, _t: &[f64], _seed: u64) -> Result<Box<dyn FittedModel>> {
        Ok(Box::new(FittedConstant { mean: self.value }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folds::stratified_partition;
    use rand::Rng;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    struct Counting {
        inner: Box<dyn BasePredictor>,
        fits: Arc<AtomicUsize>,
    }

    impl BasePredictor for Counting {
        fn name(&self) -> &str {
            self.inner.name()
        }
        fn fit(&self, f: &FeatureMatrix, t: &[f64], seed: u64) -> Result<Box<dyn FittedModel>> {
            self.fits.fetch_add(1, Ordering::SeqCst);
            self.inner.fit(f, t, seed)
        }
    }

    fn toy_data(n: usize, seed: u64) -> (FeatureMatrix, TargetVector) {
        let mut rng = seeding::rng(seed, &[99]);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 * r[0] - 2.0 * r[1] + rng.gen_range(-0.1..0.1)).collect();
        (FeatureMatrix::from_rows(rows).unwrap(), TargetVector::new(y, "y").unwrap())
    }

    #[test]
    fn global_mean_predictor_uses_out_of_fold_mean() {
        let (x, y) = toy_data(20, 1);
        let folds = stratified_partition(y.values(), 4, 1, 7).unwrap();
        let predictors: Vec<Box<dyn BasePredictor>> = vec![Box::new(ConstantMean)];
        let bundle = build_oof(&x, &y, &predictors, &folds, 42, None).unwrap();
        for i in 0..y.len() {
            let fold = folds.fold_of(i);
            let outside: Vec<f64> = (0..y.len())
                .filter(|&j| folds.fold_of(j) != fold)
                .map(|j| y.values()[j])
                .collect();
            let expected = outside.iter().sum::<f64>() / outside.len() as f64;
            assert!((bundle.oof.col(0)[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn exactly_l_times_k_fit_calls() {
        let (x, y) = toy_data(30, 2);
        let folds = stratified_partition(y.values(), 5, 1, 3).unwrap();
        let fits = Arc::new(AtomicUsize::new(0));
        let predictors: Vec<Box<dyn BasePredictor>> = vec![
            Box::new(Counting { inner: Box::new(ConstantMean), fits: fits.clone() }),
            Box::new(Counting { inner: Box::new(UnivariateLs::new(0)), fits: fits.clone() }),
            Box::new(Counting { inner: Box::new(KnnMean::new(3)), fits: fits.clone() }),
        ];
        build_oof(&x, &y, &predictors, &folds, 42, None).unwrap();
        assert_eq!(fits.load(Ordering::SeqCst), 5 * 3);
    }

    #[test]
    fn zero_predictor_rmse_matches_metric() {
        let (x, y) = toy_data(16, 3);
        let folds = stratified_partition(y.values(), 4, 1, 5).unwrap();
        let predictors: Vec<Box<dyn BasePredictor>> = vec![Box::new(ConstantValue::new(0.0, "zero"))];
        let bundle = build_oof(&x, &y, &predictors, &folds, 42, None).unwrap();
        let expected = rmse(&vec![0.0; y.len()], y.values()).unwrap();
        assert!((bundle.per_model_rmse[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn deterministic_bundle() {
        let (x, y) = toy_data(25, 4);
        let folds = stratified_partition(y.values(), 5, 5, 11).unwrap();
        let predictors: Vec<Box<dyn BasePredictor>> = vec![
            Box::new(ConstantMean),
            Box::new(UnivariateLs::new(1)),
            Box::new(FixedRidge::new(0.1)),
            Box::new(KnnMean::new(4)),
        ];
        let a = build_oof(&x, &y, &predictors, &folds, 42, Some(&x)).unwrap();
        let b = build_oof(&x, &y, &predictors, &folds, 42, Some(&x)).unwrap();
        assert_eq!(a.oof, b.oof);
        assert_eq!(a.test, b.test);
    }

    #[test]
    fn perturbing_fold_targets_leaves_that_fold_unchanged() {
        let (x, y) = toy_data(24, 5);
        let folds = stratified_partition(y.values(), 4, 1, 13).unwrap();
        let predictors: Vec<Box<dyn BasePredictor>> = vec![
            Box::new(UnivariateLs::new(0)),
            Box::new(FixedRidge::new(0.5)),
        ];
        let base = build_oof(&x, &y, &predictors, &folds, 42, None).unwrap();

        let fold = 2;
        let mut perturbed = y.values().to_vec();
        for i in folds.validation_indices(fold) {
            perturbed[i] += 100.0;
        }
        let y2 = TargetVector::new(perturbed, "y").unwrap();
        let moved = build_oof(&x, &y2, &predictors, &folds, 42, None).unwrap();

        for m in 0..predictors.len() {
            for i in folds.validation_indices(fold) {
                assert_eq!(base.oof.col(m)[i], moved.oof.col(m)[i], "model {m} row {i} leaked");
            }
        }
    }

    #[test]
    fn predictor_failure_names_model_and_fold() {
        struct Failing;
        impl BasePredictor for Failing {
            fn name(&self) -> &str {
                "failing"
            }
            fn fit(&self, _f: &FeatureMatrix, _t: &[f64], _s: u64) -> Result<Box<dyn FittedModel>> {
                Err(Error::Config("nope".into()))
            }
        }
        let (x, y) = toy_data(12, 6);
        let folds = stratified_partition(y.values(), 3, 1, 1).unwrap();
        let predictors: Vec<Box<dyn BasePredictor>> = vec![Box::new(Failing)];
        let err = build_oof(&x, &y, &predictors, &folds, 42, None).unwrap_err();
        match err {
            Error::Predictor { model, fold, .. } => {
                assert_eq!(model, "failing");
                assert_eq!(fold, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
