//! End-to-end orchestration: variance pruning → redundancy projection →
//! meta-feature augmentation → nested regularized meta-learning →
//! inverse-RMSE blending, with every enabled baseline computed on the raw
//! pool and paired significance tests against a reference method.

use crate::ensemble::{
    best_single, blend, hill_climb, linear_stack, uniform_average, weighted_average, BlendMember,
    BlendResult,
};
use crate::error::{Error, Result};
use crate::folds::{stratified_partition, FoldAssignment};
use crate::metafeatures::{augment, META_FEATURE_NAMES};
use crate::metrics::{pearson, rmse, MetricReport};
use crate::redundancy::{project, variance_prune, RedundancyConfig, SelectionResult};
use crate::seeding;
use crate::solvers::{nested_cv_fit, Design, FitResult, Grid, PenaltyKind};
use crate::stats::{
    bootstrap_ci, compare_methods, fold_consistency, BootstrapCI, BootstrapStatistic,
    FoldConsistency, TTestFlag,
};
use crate::types::{PredictionMatrix, TargetVector};
use serde::Serialize;
use std::time::Instant;

/// Baselines computed on the raw model pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    BestSingle,
    UniformAverage,
    WeightedAverage,
    OlsStack,
    RidgeStack,
    HillClimb,
}

impl BaselineKind {
    pub fn all() -> Vec<BaselineKind> {
        vec![
            BaselineKind::BestSingle,
            BaselineKind::UniformAverage,
            BaselineKind::WeightedAverage,
            BaselineKind::OlsStack,
            BaselineKind::RidgeStack,
            BaselineKind::HillClimb,
        ]
    }

    pub fn key(&self) -> &'static str {
        match self {
            BaselineKind::BestSingle => "best_single",
            BaselineKind::UniformAverage => "uniform_average",
            BaselineKind::WeightedAverage => "weighted_average",
            BaselineKind::OlsStack => "ols_stack",
            BaselineKind::RidgeStack => "ridge_stack",
            BaselineKind::HillClimb => "hill_climb",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BaselineKind::BestSingle => "Best Single Model",
            BaselineKind::UniformAverage => "Simple Average",
            BaselineKind::WeightedAverage => "Weighted Average",
            BaselineKind::OlsStack => "Vanilla Stacking (Linear)",
            BaselineKind::RidgeStack => "Vanilla Stacking (Ridge)",
            BaselineKind::HillClimb => "Hill Climbing (Greedy)",
        }
    }
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "best_single" => Ok(BaselineKind::BestSingle),
            "uniform" | "uniform_average" => Ok(BaselineKind::UniformAverage),
            "weighted" | "weighted_average" => Ok(BaselineKind::WeightedAverage),
            "ols" | "ols_stack" | "linear_stack" => Ok(BaselineKind::OlsStack),
            "ridge_stack" | "vanilla_ridge" => Ok(BaselineKind::RidgeStack),
            "hill_climb" | "hillclimb" => Ok(BaselineKind::HillClimb),
            other => Err(Error::Config(format!("unknown baseline '{other}'"))),
        }
    }
}

/// Full pipeline configuration; defaults mirror the reference protocol
/// (10 stratified folds, seed 42, τ_corr 0.95, τ_var 0.01, inner 3-fold
/// selection, all three meta-learners, all baselines).
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub folds: usize,
    pub seed: u64,
    /// Quantile bins for stratification; defaults to `folds` when unset.
    pub n_bins: Option<usize>,
    pub tau_corr: f64,
    /// Pairwise-MSE suppression threshold; defaults to 0.05·Var(target)
    /// when unset.
    pub tau_mse: Option<f64>,
    pub tau_var: f64,
    pub grid: Grid,
    pub meta_learners: Vec<PenaltyKind>,
    pub baselines: Vec<BaselineKind>,
    pub inner_folds: usize,
    /// λ of the vanilla ridge stacking baseline.
    pub vanilla_lambda: f64,
    pub hill_climb_max_steps: usize,
    pub hill_climb_patience: usize,
    pub alpha: f64,
    pub bootstrap_resamples: usize,
    pub bootstrap_level: f64,
    pub cd_tol: f64,
    pub cd_max_iter: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 42,
            n_bins: None,
            tau_corr: 0.95,
            tau_mse: None,
            tau_var: 0.01,
            grid: Grid::default(),
            meta_learners: vec![PenaltyKind::Ridge, PenaltyKind::Lasso, PenaltyKind::ElasticNet],
            baselines: BaselineKind::all(),
            inner_folds: 3,
            vanilla_lambda: 1.2,
            hill_climb_max_steps: 100,
            hill_climb_patience: 10,
            alpha: 0.05,
            bootstrap_resamples: 1000,
            bootstrap_level: 0.95,
            cd_tol: 1e-7,
            cd_max_iter: 10_000,
        }
    }
}

/// The configuration as actually applied, with every default resolved.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub folds: usize,
    pub seed: u64,
    pub n_bins: usize,
    pub tau_corr: f64,
    pub tau_mse: f64,
    pub tau_var: f64,
    pub grid: Grid,
    pub meta_learners: Vec<PenaltyKind>,
    pub baselines: Vec<BaselineKind>,
    pub inner_folds: usize,
    pub vanilla_lambda: f64,
    pub hill_climb_max_steps: usize,
    pub hill_climb_patience: usize,
    pub alpha: f64,
    pub bootstrap_resamples: usize,
    pub bootstrap_level: f64,
    pub cd_tol: f64,
    pub cd_max_iter: usize,
}

impl PipelineConfig {
    fn echo(&self, tau_mse: f64) -> ConfigEcho {
        ConfigEcho {
            folds: self.folds,
            seed: self.seed,
            n_bins: self.n_bins.unwrap_or(self.folds),
            tau_corr: self.tau_corr,
            tau_mse,
            tau_var: self.tau_var,
            grid: self.grid.clone(),
            meta_learners: self.meta_learners.clone(),
            baselines: self.baselines.clone(),
            inner_folds: self.inner_folds,
            vanilla_lambda: self.vanilla_lambda,
            hill_climb_max_steps: self.hill_climb_max_steps,
            hill_climb_patience: self.hill_climb_patience,
            alpha: self.alpha,
            bootstrap_resamples: self.bootstrap_resamples,
            bootstrap_level: self.bootstrap_level,
            cd_tol: self.cd_tol,
            cd_max_iter: self.cd_max_iter,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonSummary {
    pub vs: String,
    pub t_stat: f64,
    pub p_value: f64,
    pub flag: TTestFlag,
    pub bonferroni_alpha: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub key: String,
    pub label: String,
    pub n_models: usize,
    pub metrics: MetricReport,
    pub ci: BootstrapCI,
    pub per_fold_rmse: Vec<f64>,
    pub fold_consistency: FoldConsistency,
    pub comparison: Option<ComparisonSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionSummary {
    pub n_input: usize,
    pub variance_removed: Vec<String>,
    pub result: SelectionResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureType {
    Base,
    Statistical,
    Interaction,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub feature: String,
    pub mean_weight: f64,
    pub feature_type: FeatureType,
    pub oof_rmse: Option<f64>,
}

/// Coefficient-magnitude table for one fitted meta-learner.
#[derive(Debug, Clone, Serialize)]
pub struct WeightReport {
    pub learner: String,
    /// All features sorted by |mean weight| descending.
    pub rows: Vec<WeightRow>,
    pub mean_abs_weight_base: f64,
    pub mean_abs_weight_statistical: f64,
    pub mean_abs_weight_interaction: f64,
    /// Mean-absolute-difference Gini of |weights|, normalized by 2·mean.
    pub gini: f64,
    /// Pearson correlation between base-feature |weight| and model OOF
    /// RMSE; absent when fewer than two base features or degenerate.
    pub weight_rmse_correlation: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitCallCount {
    pub learner: String,
    pub calls: u64,
    pub unconverged: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// The serializable run report. Stage timings are carried in memory but
/// excluded from serialization so identical runs serialize identically.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub n_samples: usize,
    pub n_models_input: usize,
    pub reference_method: String,
    pub methods: Vec<MethodReport>,
    pub selection: SelectionSummary,
    pub blend: BlendResult,
    pub weight_table: WeightReport,
    pub fit_calls: Vec<FitCallCount>,
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

pub struct PipelineInput<'a> {
    pub pool: &'a PredictionMatrix,
    pub target: &'a TargetVector,
    pub test: Option<&'a PredictionMatrix>,
}

/// Everything a caller might want beyond the report itself.
pub struct PipelineOutcome {
    pub report: RunReport,
    pub final_oof: Vec<f64>,
    pub final_test: Option<Vec<f64>>,
    pub meta_fits: Vec<FitResult>,
    pub selection: SelectionResult,
    pub folds: FoldAssignment,
}

fn per_fold_rmse(pred: &[f64], y: &[f64], folds: &FoldAssignment) -> Result<Vec<f64>> {
    (0..folds.n_folds())
        .map(|f| {
            let idx = folds.validation_indices(f);
            let p: Vec<f64> = idx.iter().map(|&i| pred[i]).collect();
            let t: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            rmse(&p, &t)
        })
        .collect()
}

struct MethodOutcome {
    key: String,
    label: String,
    n_models: usize,
    pred: Vec<f64>,
}

/// Selects the test-matrix columns matching `names`, in that order.
fn align_test(test: &PredictionMatrix, names: &[String]) -> Result<PredictionMatrix> {
    let indices: Vec<usize> = names
        .iter()
        .map(|n| {
            test.names().iter().position(|t| t == n).ok_or_else(|| {
                Error::Dimension(format!("test file is missing model column '{n}'"))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    test.select(&indices)
}

pub fn run(input: &PipelineInput, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let pool = input.pool;
    let y = input.target;
    if pool.n_rows() != y.len() {
        return Err(Error::Dimension(format!(
            "pool has {} rows, target has {}",
            pool.n_rows(),
            y.len()
        )));
    }
    if cfg.meta_learners.is_empty() {
        return Err(Error::Config("at least one meta-learner is required".into()));
    }
    let test = match input.test {
        Some(t) => Some(align_test(t, pool.names())?),
        None => None,
    };

    let tau_mse = cfg.tau_mse.unwrap_or(0.05 * y.variance());
    let red_cfg = RedundancyConfig::new(cfg.tau_corr, tau_mse, cfg.tau_var)?;
    let mut timings = Vec::new();
    let timed = |stage: &str, start: Instant, timings: &mut Vec<StageTiming>| {
        timings.push(StageTiming { stage: stage.to_string(), seconds: start.elapsed().as_secs_f64() });
    };

    // stage: folds
    let t0 = Instant::now();
    let folds = stratified_partition(
        y.values(),
        cfg.folds,
        cfg.n_bins.unwrap_or(cfg.folds),
        cfg.seed,
    )
    .map_err(|e| e.in_stage("folds"))?;
    timed("folds", t0, &mut timings);

    // stage: variance pruning then redundancy projection
    let t0 = Instant::now();
    let (pruned, variance_removed) =
        variance_prune(pool, cfg.tau_var).map_err(|e| e.in_stage("variance_prune"))?;
    let selection = project(&pruned, y, &red_cfg).map_err(|e| e.in_stage("project"))?;
    let retained = pruned.select(&selection.retained)?;
    timed("selection", t0, &mut timings);

    // stage: meta-feature augmentation
    let t0 = Instant::now();
    let meta = augment(&retained).map_err(|e| e.in_stage("augment"))?;
    let design = Design::from(&meta);
    let meta_test_cols: Option<Vec<Vec<f64>>> = match &test {
        Some(t) => {
            let retained_test = align_test(t, retained.names())?;
            Some(augment(&retained_test).map_err(|e| e.in_stage("augment_test"))?.columns)
        }
        None => None,
    };
    timed("augment", t0, &mut timings);

    // stage: nested meta-learning
    let t0 = Instant::now();
    let mut meta_fits: Vec<FitResult> = Vec::new();
    let mut fit_calls: Vec<FitCallCount> = Vec::new();
    for &kind in &cfg.meta_learners {
        let fit = nested_cv_fit(
            &design,
            y.values(),
            &folds,
            kind,
            &cfg.grid,
            cfg.inner_folds,
            cfg.cd_tol,
            cfg.cd_max_iter,
        )
        .map_err(|e| e.in_stage(&format!("meta_{}", kind.label())))?;
        fit_calls.push(FitCallCount {
            learner: format!("meta_{}", kind.label()),
            calls: fit.fit_calls,
            unconverged: fit.n_unconverged,
        });
        meta_fits.push(fit);
    }
    timed("meta_fit", t0, &mut timings);

    // stage: blending
    let t0 = Instant::now();
    let members: Vec<BlendMember> = meta_fits
        .iter()
        .map(|fit| {
            let test_pred = match &meta_test_cols {
                Some(cols) => Some(fit.predict(cols)?),
                None => None,
            };
            Ok(BlendMember {
                name: format!("meta_{}", fit.kind.label()),
                oof: fit.oof_pred.clone(),
                test: test_pred,
            })
        })
        .collect::<Result<Vec<BlendMember>>>()?;
    let blended = blend(&members, y).map_err(|e| e.in_stage("blend"))?;
    timed("blend", t0, &mut timings);

    // stage: baselines on the raw pool
    let t0 = Instant::now();
    let mut outcomes: Vec<MethodOutcome> = Vec::new();
    for &b in &cfg.baselines {
        let stage = |e: Error| e.in_stage(b.key());
        let outcome = match b {
            BaselineKind::BestSingle => {
                let (name, _) = best_single(pool, y).map_err(stage)?;
                let j = pool.names().iter().position(|n| *n == name).unwrap();
                MethodOutcome {
                    key: b.key().into(),
                    label: b.label().into(),
                    n_models: 1,
                    pred: pool.col(j).to_vec(),
                }
            }
            BaselineKind::UniformAverage => MethodOutcome {
                key: b.key().into(),
                label: b.label().into(),
                n_models: pool.n_cols(),
                pred: uniform_average(pool),
            },
            BaselineKind::WeightedAverage => {
                let (_, pred) = weighted_average(pool, y).map_err(stage)?;
                MethodOutcome {
                    key: b.key().into(),
                    label: b.label().into(),
                    n_models: pool.n_cols(),
                    pred,
                }
            }
            BaselineKind::OlsStack => {
                let fit = linear_stack(pool, y, &folds, 0.0).map_err(stage)?;
                fit_calls.push(FitCallCount {
                    learner: b.key().into(),
                    calls: fit.fit_calls,
                    unconverged: fit.n_unconverged,
                });
                MethodOutcome {
                    key: b.key().into(),
                    label: b.label().into(),
                    n_models: pool.n_cols(),
                    pred: fit.oof_pred,
                }
            }
            BaselineKind::RidgeStack => {
                let fit = linear_stack(pool, y, &folds, cfg.vanilla_lambda).map_err(stage)?;
                fit_calls.push(FitCallCount {
                    learner: b.key().into(),
                    calls: fit.fit_calls,
                    unconverged: fit.n_unconverged,
                });
                MethodOutcome {
                    key: b.key().into(),
                    label: b.label().into(),
                    n_models: pool.n_cols(),
                    pred: fit.oof_pred,
                }
            }
            BaselineKind::HillClimb => {
                let state =
                    hill_climb(pool, y, cfg.hill_climb_max_steps, cfg.hill_climb_patience)
                        .map_err(stage)?;
                MethodOutcome {
                    key: b.key().into(),
                    label: b.label().into(),
                    n_models: state.counts.iter().filter(|&&c| c > 0).count(),
                    pred: state.current_pred,
                }
            }
        };
        outcomes.push(outcome);
    }
    timed("baselines", t0, &mut timings);

    for fit in &meta_fits {
        outcomes.push(MethodOutcome {
            key: format!("meta_{}", fit.kind.label()),
            label: match fit.kind {
                PenaltyKind::Ridge => "Ridge Meta-Learner".into(),
                PenaltyKind::Lasso => "Lasso Meta-Learner".into(),
                PenaltyKind::ElasticNet => "ElasticNet Meta-Learner".into(),
            },
            n_models: selection.k_eff,
            pred: fit.oof_pred.clone(),
        });
    }
    outcomes.push(MethodOutcome {
        key: "full_ensemble".into(),
        label: "Full Regularized Ensemble".into(),
        n_models: selection.k_eff,
        pred: blended.final_oof.clone(),
    });

    // stage: statistics
    let t0 = Instant::now();
    let reference_method = if cfg.baselines.contains(&BaselineKind::HillClimb) {
        "hill_climb".to_string()
    } else {
        "full_ensemble".to_string()
    };
    let ref_trace = {
        let reference = outcomes.iter().find(|o| o.key == reference_method).unwrap();
        per_fold_rmse(&reference.pred, y.values(), &folds)?
    };
    let m_comparisons = outcomes.len().saturating_sub(1).max(1);

    let mut methods = Vec::with_capacity(outcomes.len());
    for (idx, o) in outcomes.iter().enumerate() {
        let metrics = MetricReport::compute(&o.pred, y.values())
            .map_err(|e| e.in_stage(&format!("metrics for {}", o.key)))?;
        let trace = per_fold_rmse(&o.pred, y.values(), &folds)?;
        let consistency = fold_consistency(&trace)?;
        let errors: Vec<f64> = o.pred.iter().zip(y.values()).map(|(p, t)| p - t).collect();
        let ci = bootstrap_ci(
            &errors,
            BootstrapStatistic::Rmse,
            cfg.bootstrap_resamples,
            cfg.bootstrap_level,
            seeding::derive(cfg.seed, &[0xC1, idx as u64]),
        )?;
        let comparison = if o.key == reference_method {
            None
        } else {
            let c = compare_methods(
                &o.key,
                &trace,
                &reference_method,
                &ref_trace,
                cfg.alpha,
                m_comparisons,
            )?;
            Some(ComparisonSummary {
                vs: reference_method.clone(),
                t_stat: c.t_stat,
                p_value: c.p_value,
                flag: c.flag,
                bonferroni_alpha: c.bonferroni_alpha,
                significant: c.significant,
            })
        };
        methods.push(MethodReport {
            key: o.key.clone(),
            label: o.label.clone(),
            n_models: o.n_models,
            metrics,
            ci,
            per_fold_rmse: trace,
            fold_consistency: consistency,
            comparison,
        });
    }
    timed("statistics", t0, &mut timings);

    // weight table for the first meta-learner (ridge first when present)
    let table_fit = meta_fits
        .iter()
        .find(|f| f.kind == PenaltyKind::Ridge)
        .unwrap_or(&meta_fits[0]);
    let retained_rmse: Vec<f64> = (0..retained.n_cols())
        .map(|j| rmse(retained.col(j), y.values()))
        .collect::<Result<Vec<f64>>>()?;
    let weight_table = weight_report(table_fit, &retained_rmse)?;

    let final_test = blended.final_test.clone();
    let report = RunReport {
        schema_version: 1,
        config: cfg.echo(tau_mse),
        n_samples: y.len(),
        n_models_input: pool.n_cols(),
        reference_method,
        methods,
        selection: SelectionSummary {
            n_input: pool.n_cols(),
            variance_removed,
            result: selection.clone(),
        },
        blend: blended.clone(),
        weight_table,
        fit_calls,
        timings,
    };

    Ok(PipelineOutcome {
        final_oof: blended.final_oof,
        final_test,
        report,
        meta_fits,
        selection,
        folds,
    })
}

/// Gini coefficient of a nonnegative vector: mean absolute difference
/// normalized by twice the mean. 0 for all-equal values, (d−1)/d for a
/// single nonzero entry among d.
pub fn gini(values: &[f64]) -> f64 {
    let d = values.len();
    if d == 0 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / d as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let mut mad = 0.0;
    for a in values {
        for b in values {
            mad += (a - b).abs();
        }
    }
    mad / (d as f64 * d as f64) / (2.0 * mean)
}

/// Builds the coefficient-magnitude table for a fitted meta-learner.
/// `per_model_rmse` aligns with the fit's base-model features (the
/// leading columns before the engineered ones).
pub fn weight_report(fit: &FitResult, per_model_rmse: &[f64]) -> Result<WeightReport> {
    let d = fit.feature_names.len();
    // engineered features are the trailing block with the fixed names
    let has_meta = d >= 6
        && fit.feature_names[d - 6..]
            .iter()
            .zip(META_FEATURE_NAMES.iter())
            .all(|(a, b)| a == b);
    let n_base = if has_meta { d - 6 } else { d };
    if per_model_rmse.len() != n_base {
        return Err(Error::Dimension(format!(
            "got {} per-model RMSEs for {n_base} base features",
            per_model_rmse.len()
        )));
    }

    let mut rows: Vec<WeightRow> = (0..d)
        .map(|j| {
            let feature_type = if j < n_base {
                FeatureType::Base
            } else if j < n_base + 4 {
                FeatureType::Statistical
            } else {
                FeatureType::Interaction
            };
            WeightRow {
                feature: fit.feature_names[j].clone(),
                mean_weight: fit.weights[j],
                feature_type,
                oof_rmse: if j < n_base { Some(per_model_rmse[j]) } else { None },
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.mean_weight
            .abs()
            .partial_cmp(&a.mean_weight.abs())
            .unwrap()
            .then_with(|| a.feature.cmp(&b.feature))
    });

    let mean_abs = |rows: &[WeightRow], t: FeatureType| {
        let vals: Vec<f64> =
            rows.iter().filter(|r| r.feature_type == t).map(|r| r.mean_weight.abs()).collect();
        if vals.is_empty() {
            0.0
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };

    let abs_weights: Vec<f64> = fit.weights.iter().map(|w| w.abs()).collect();
    let base_abs: Vec<f64> = abs_weights[..n_base].to_vec();
    let weight_rmse_correlation = if n_base >= 2 {
        pearson(&base_abs, per_model_rmse).ok()
    } else {
        None
    };

    Ok(WeightReport {
        learner: fit.kind.label().to_string(),
        mean_abs_weight_base: mean_abs(&rows, FeatureType::Base),
        mean_abs_weight_statistical: mean_abs(&rows, FeatureType::Statistical),
        mean_abs_weight_interaction: mean_abs(&rows, FeatureType::Interaction),
        gini: gini(&abs_weights),
        weight_rmse_correlation,
        rows,
    })
}

/// One row of the cumulative ablation.
#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub configuration: String,
    pub label: String,
    pub metrics: MetricReport,
    /// RMSE change versus the previous row; absent for the baseline.
    pub delta_rmse: Option<f64>,
    /// Cumulative relative improvement versus the baseline, percent.
    pub cumulative_gain_percent: f64,
}

/// Cumulative ablation: components are added one at a time.
///
/// Rows 1–3 (baseline, +de-duplication, +variance pruning) use the
/// fixed-λ vanilla ridge stack so the baseline row is exactly
/// `linear_stack`; rows 4–5 switch to the cross-validated ridge
/// meta-learner over the engineered design; row 6 is the full blended
/// pipeline.
pub fn ablate(
    pool: &PredictionMatrix,
    target: &TargetVector,
    cfg: &PipelineConfig,
) -> Result<Vec<AblationRow>> {
    let y = target;
    let folds = stratified_partition(
        y.values(),
        cfg.folds,
        cfg.n_bins.unwrap_or(cfg.folds),
        cfg.seed,
    )?;
    let tau_mse = cfg.tau_mse.unwrap_or(0.05 * y.variance());
    let red_cfg = RedundancyConfig::new(cfg.tau_corr, tau_mse, cfg.tau_var)?;

    let mut preds: Vec<(String, String, Vec<f64>)> = Vec::new();

    // 1: fixed-λ ridge stack on the raw pool
    let base_fit = linear_stack(pool, y, &folds, cfg.vanilla_lambda)?;
    preds.push((
        "baseline_ridge_stack".into(),
        "Baseline (Ridge stack, no preprocessing)".into(),
        base_fit.oof_pred,
    ));

    // 2: + de-duplication
    let sel_raw = project(pool, y, &red_cfg)?;
    let dedup_pool = pool.select(&sel_raw.retained)?;
    let fit = linear_stack(&dedup_pool, y, &folds, cfg.vanilla_lambda)?;
    preds.push(("dedup".into(), "+ Multi-metric de-duplication".into(), fit.oof_pred));

    // 3: + variance pruning (prune, then project the pruned pool)
    let (pruned, _) = variance_prune(pool, cfg.tau_var)?;
    let sel = project(&pruned, y, &red_cfg)?;
    let retained = pruned.select(&sel.retained)?;
    let fit = linear_stack(&retained, y, &folds, cfg.vanilla_lambda)?;
    preds.push(("variance_pruning".into(), "+ Variance-based pruning".into(), fit.oof_pred));

    // 4: + statistical aggregations (mean/std/median/range), CV ridge
    let full_meta = augment(&retained)?;
    let stat_design = Design {
        names: full_meta.column_names[..full_meta.n_models + 4].to_vec(),
        cols: full_meta.columns[..full_meta.n_models + 4].to_vec(),
    };
    let fit = nested_cv_fit(
        &stat_design,
        y.values(),
        &folds,
        PenaltyKind::Ridge,
        &cfg.grid,
        cfg.inner_folds,
        cfg.cd_tol,
        cfg.cd_max_iter,
    )?;
    preds.push((
        "statistical_aggregations".into(),
        "+ Statistical aggregations".into(),
        fit.oof_pred,
    ));

    // 5: + interaction features (the full engineered design), CV ridge
    let design = Design::from(&full_meta);
    let ridge_fit = nested_cv_fit(
        &design,
        y.values(),
        &folds,
        PenaltyKind::Ridge,
        &cfg.grid,
        cfg.inner_folds,
        cfg.cd_tol,
        cfg.cd_max_iter,
    )?;
    preds.push((
        "interaction_features".into(),
        "+ Interaction features".into(),
        ridge_fit.oof_pred.clone(),
    ));

    // 6: + meta-ensemble blending over all configured meta-learners
    let mut members = Vec::new();
    for &kind in &cfg.meta_learners {
        let oof = if kind == PenaltyKind::Ridge {
            ridge_fit.oof_pred.clone()
        } else {
            nested_cv_fit(
                &design,
                y.values(),
                &folds,
                kind,
                &cfg.grid,
                cfg.inner_folds,
                cfg.cd_tol,
                cfg.cd_max_iter,
            )?
            .oof_pred
        };
        members.push(BlendMember { name: format!("meta_{}", kind.label()), oof, test: None });
    }
    let blended = blend(&members, y)?;
    preds.push((
        "meta_ensemble_blending".into(),
        "+ Meta-ensemble blending".into(),
        blended.final_oof,
    ));

    let mut rows = Vec::with_capacity(preds.len());
    let mut prev_rmse: Option<f64> = None;
    let mut base_rmse = 0.0;
    for (i, (configuration, label, pred)) in preds.into_iter().enumerate() {
        let metrics = MetricReport::compute(&pred, y.values())?;
        if i == 0 {
            base_rmse = metrics.rmse;
        }
        rows.push(AblationRow {
            configuration,
            label,
            delta_rmse: prev_rmse.map(|p| metrics.rmse - p),
            cumulative_gain_percent: 100.0 * (metrics.rmse - base_rmse) / base_rmse,
            metrics,
        });
        prev_rmse = Some(metrics.rmse);
    }
    Ok(rows)
}
