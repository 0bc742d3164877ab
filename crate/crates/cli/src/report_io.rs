//! Report emission: a machine-readable JSON document (the stable
//! contract), an aligned human-readable text table, and plot-ready
//! long-format CSVs. Stage timings go to their own file so the canonical
//! reports stay byte-identical across reruns.

use anyhow::{Context, Result};
use restack_core::pipeline::{AblationRow, PipelineOutcome, RunReport};
use restack_core::redundancy::SelectionResult;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// One row of the binned prediction-error profile.
#[derive(Debug, Serialize)]
pub struct PredictionBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

/// Splits the target range into equal-width bins and profiles the
/// prediction error (pred − target) inside each.
pub fn prediction_bins(target: &[f64], pred: &[f64], n_bins: usize) -> Vec<PredictionBin> {
    let lo = target.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = target.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / n_bins as f64 } else { 1.0 };
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
    for (&t, &p) in target.iter().zip(pred) {
        let mut b = ((t - lo) / width) as usize;
        if b >= n_bins {
            b = n_bins - 1;
        }
        bins[b].push(p - t);
    }
    bins.into_iter()
        .enumerate()
        .map(|(i, errs)| {
            let count = errs.len();
            let (mean, std) = if count == 0 {
                (0.0, 0.0)
            } else {
                let mean = errs.iter().sum::<f64>() / count as f64;
                let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / count as f64;
                (mean, var.sqrt())
            };
            PredictionBin {
                bin_lo: lo + i as f64 * width,
                bin_hi: lo + (i + 1) as f64 * width,
                count,
                mean_error: mean,
                std_error: std,
            }
        })
        .collect()
}

fn format_p(report_row: &restack_core::pipeline::MethodReport) -> String {
    match &report_row.comparison {
        None => "baseline".to_string(),
        Some(c) => {
            let star = if c.significant { "*" } else { "" };
            if c.p_value < 0.001 {
                format!("<0.001{star}")
            } else {
                format!("{:.3}{star}", c.p_value)
            }
        }
    }
}

/// Renders the aligned-text report. Excludes timings so identical runs
/// render identically.
pub fn render_text(report: &RunReport) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "restack report (schema v{})", report.schema_version)?;
    writeln!(s, "{}", "=".repeat(100))?;
    writeln!(
        s,
        "samples: {}    input models: {}    retained after de-duplication: {}",
        report.n_samples, report.n_models_input, report.selection.result.k_eff
    )?;
    writeln!(
        s,
        "reference method: {}    alpha: {}    comparisons: {}",
        report.reference_method,
        report.config.alpha,
        report.methods.len().saturating_sub(1)
    )?;
    writeln!(s)?;

    writeln!(
        s,
        "{:<34} {:>9} {:>19} {:>9} {:>8} {:>8} {:>8}  {}",
        "Method", "RMSE", "95% CI", "MAE", "R^2", "Pearson", "#Models", "p vs ref"
    )?;
    writeln!(s, "{}", "-".repeat(112))?;
    for m in &report.methods {
        writeln!(
            s,
            "{:<34} {:>9.6} [{:>8.6}, {:>8.6}] {:>9.6} {:>8.4} {:>8.4} {:>8}  {}",
            m.label,
            m.metrics.rmse,
            m.ci.lo,
            m.ci.hi,
            m.metrics.mae,
            m.metrics.r_squared,
            m.metrics.pearson,
            m.n_models,
            format_p(m)
        )?;
    }
    writeln!(s)?;

    let sel = &report.selection;
    writeln!(s, "De-duplication ({} removed):", sel.result.removals.len())?;
    if sel.result.removals.is_empty() {
        writeln!(s, "  none")?;
    } else {
        writeln!(
            s,
            "  {:<24} {:<24} {:>8} {:>12}",
            "Removed Model", "Kept Alternative", "rho", "delta RMSE"
        )?;
        for r in &sel.result.removals {
            writeln!(
                s,
                "  {:<24} {:<24} {:>8.4} {:>+12.4}",
                r.removed, r.kept, r.rho, r.delta_rmse
            )?;
        }
    }
    if sel.variance_removed.is_empty() {
        writeln!(s, "Variance pruning removed: none")?;
    } else {
        writeln!(s, "Variance pruning removed: {}", sel.variance_removed.join(", "))?;
    }
    let before = &sel.result.before;
    let after = &sel.result.after;
    let reduction = if before.kappa.is_finite() && before.kappa > 0.0 {
        format!("{:.1}% reduction", 100.0 * (1.0 - after.kappa / before.kappa))
    } else {
        "from a singular pool".to_string()
    };
    writeln!(
        s,
        "Conditioning: kappa {:.3} -> {:.3} ({reduction}); eff_rank {:.3} -> {:.3}",
        before.kappa, after.kappa, before.eff_rank, after.eff_rank
    )?;
    writeln!(s)?;

    writeln!(s, "Blend (inverse-RMSE weights over meta-learners):")?;
    for ((name, risk), weight) in report
        .blend
        .member_names
        .iter()
        .zip(&report.blend.risks)
        .zip(&report.blend.weights)
    {
        writeln!(s, "  {:<20} risk {:>9.6}  weight {:>8.6}", name, risk, weight)?;
    }
    writeln!(s)?;

    let wt = &report.weight_table;
    writeln!(s, "Top features by |mean weight| ({} meta-learner):", wt.learner)?;
    writeln!(s, "  {:<28} {:>12} {:<13} {:>10}", "Feature", "Mean Weight", "Type", "OOF RMSE")?;
    for row in wt.rows.iter().take(10) {
        let rmse = match row.oof_rmse {
            Some(r) => format!("{r:.4}"),
            None => "-".to_string(),
        };
        writeln!(
            s,
            "  {:<28} {:>+12.6} {:<13} {:>10}",
            row.feature,
            row.mean_weight,
            format!("{:?}", row.feature_type),
            rmse
        )?;
    }
    writeln!(
        s,
        "  mean |weight|: base {:.6}, statistical {:.6}, interaction {:.6}",
        wt.mean_abs_weight_base, wt.mean_abs_weight_statistical, wt.mean_abs_weight_interaction
    )?;
    let corr = match wt.weight_rmse_correlation {
        Some(c) => format!("{c:.4}"),
        None => "-".to_string(),
    };
    writeln!(s, "  gini of |weights|: {:.4}    weight-RMSE correlation: {corr}", wt.gini)?;
    writeln!(s)?;

    writeln!(s, "Fold consistency (per-fold OOF RMSE):")?;
    writeln!(s, "  {:<34} {:>10} {:>10} {:>8}", "Method", "Mean", "Std", "CV%")?;
    for m in &report.methods {
        writeln!(
            s,
            "  {:<34} {:>10.6} {:>10.6} {:>7.2}%",
            m.label, m.fold_consistency.mean, m.fold_consistency.std, m.fold_consistency.cv_percent
        )?;
    }
    writeln!(s)?;

    writeln!(s, "Effective configuration:")?;
    writeln!(s, "{}", serde_json::to_string_pretty(&report.config)?)?;
    Ok(s)
}

/// Writes every artifact of a pipeline run into `out_dir`.
pub fn write_run_outputs(
    out_dir: &Path,
    outcome: &PipelineOutcome,
    target: &[f64],
    test_ids: Option<&[String]>,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let report = &outcome.report;

    write_file(&out_dir.join("report.json"), &json_line(report)?)?;
    write_file(&out_dir.join("report.txt"), &render_text(report)?)?;

    // de-duplication log, same columns as the selection analysis table
    let mut log = String::from("removed_model,kept_alternative,rho,delta_rmse\n");
    for r in &report.selection.result.removals {
        writeln!(log, "{},{},{},{}", r.removed, r.kept, r.rho, r.delta_rmse)?;
    }
    write_file(&out_dir.join("selection_log.csv"), &log)?;

    let mut traces = String::from("method,fold,rmse\n");
    for m in &report.methods {
        for (fold, r) in m.per_fold_rmse.iter().enumerate() {
            writeln!(traces, "{},{},{}", m.key, fold, r)?;
        }
    }
    write_file(&out_dir.join("fold_traces.csv"), &traces)?;

    let mut weights = String::from("member,risk,weight\n");
    for ((name, risk), weight) in report
        .blend
        .member_names
        .iter()
        .zip(&report.blend.risks)
        .zip(&report.blend.weights)
    {
        writeln!(weights, "{name},{risk},{weight}")?;
    }
    write_file(&out_dir.join("blend_weights.csv"), &weights)?;

    // regularization-path data: one row per (learner, alpha, lambda)
    let mut path_csv = String::from("learner,alpha,lambda,mean_rmse,std_rmse,selected_folds\n");
    for fit in &outcome.meta_fits {
        for point in &fit.path {
            let l = point.fold_rmse.len() as f64;
            let mean = point.fold_rmse.iter().sum::<f64>() / l;
            let var = point
                .fold_rmse
                .iter()
                .map(|r| (r - mean) * (r - mean))
                .sum::<f64>()
                / (l - 1.0).max(1.0);
            let selected = fit
                .fold_fits
                .iter()
                .filter(|ff| ff.penalty.lambda == point.lambda && ff.penalty.alpha == point.alpha)
                .count();
            writeln!(
                path_csv,
                "{},{},{},{},{},{}",
                fit.kind.label(),
                point.alpha,
                point.lambda,
                mean,
                var.sqrt(),
                selected
            )?;
        }
    }
    write_file(&out_dir.join("regularization_path.csv"), &path_csv)?;

    let mut bins_csv = String::from("bin_lo,bin_hi,count,mean_error,std_error\n");
    for b in prediction_bins(target, &outcome.final_oof, 10) {
        writeln!(
            bins_csv,
            "{},{},{},{},{}",
            b.bin_lo, b.bin_hi, b.count, b.mean_error, b.std_error
        )?;
    }
    write_file(&out_dir.join("prediction_bins.csv"), &bins_csv)?;

    if let (Some(test_pred), Some(ids)) = (&outcome.final_test, test_ids) {
        let mut preds = String::from("id,prediction\n");
        for (id, p) in ids.iter().zip(test_pred) {
            writeln!(preds, "{id},{p}")?;
        }
        write_file(&out_dir.join("test_predictions.csv"), &preds)?;
    }

    // volatile by nature; deliberately not part of the canonical report
    write_file(&out_dir.join("timings.json"), &json_line(&report.timings)?)?;
    Ok(())
}

pub fn write_ablation_outputs(out_dir: &Path, rows: &[AblationRow]) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    write_file(&out_dir.join("ablation.json"), &json_line(&rows)?)?;

    let mut csv =
        String::from("configuration,rmse,mae,r_squared,pearson,delta_rmse,cumulative_gain_percent\n");
    for r in rows {
        let delta = match r.delta_rmse {
            Some(d) => format!("{d}"),
            None => String::new(),
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.configuration,
            r.metrics.rmse,
            r.metrics.mae,
            r.metrics.r_squared,
            r.metrics.pearson,
            delta,
            r.cumulative_gain_percent
        )?;
    }
    write_file(&out_dir.join("ablation.csv"), &csv)?;

    let mut txt = String::new();
    writeln!(txt, "Cumulative ablation")?;
    writeln!(txt, "{}", "-".repeat(84))?;
    writeln!(txt, "{:<44} {:>9} {:>10} {:>12}", "Configuration", "RMSE", "dRMSE", "Cum. gain %")?;
    for r in rows {
        let delta = match r.delta_rmse {
            Some(d) => format!("{d:+.4}"),
            None => "-".to_string(),
        };
        writeln!(
            txt,
            "{:<44} {:>9.6} {:>10} {:>11.2}%",
            r.label, r.metrics.rmse, delta, r.cumulative_gain_percent
        )?;
    }
    write_file(&out_dir.join("ablation.txt"), &txt)?;
    Ok(())
}

/// Serializable payload for the dedup subcommand.
#[derive(Debug, Serialize)]
pub struct DedupReport {
    pub tau_corr: f64,
    pub tau_mse: f64,
    pub tau_var: f64,
    pub n_input: usize,
    pub variance_removed: Vec<String>,
    pub result: SelectionResult,
}

pub fn write_dedup_outputs(out_dir: &Path, report: &DedupReport) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    write_file(&out_dir.join("dedup.json"), &json_line(report)?)?;

    let mut log = String::from("removed_model,kept_alternative,rho,delta_rmse\n");
    for r in &report.result.removals {
        writeln!(log, "{},{},{},{}", r.removed, r.kept, r.rho, r.delta_rmse)?;
    }
    write_file(&out_dir.join("dedup_log.csv"), &log)?;

    let mut txt = String::new();
    writeln!(
        txt,
        "De-duplication at tau_corr={}, tau_mse={}, tau_var={}",
        report.tau_corr, report.tau_mse, report.tau_var
    )?;
    writeln!(
        txt,
        "input models: {}   retained: {}   removed by variance: {}",
        report.n_input,
        report.result.k_eff,
        report.variance_removed.len()
    )?;
    writeln!(
        txt,
        "kappa {:.3} -> {:.3}; eff_rank {:.3} -> {:.3}",
        report.result.before.kappa,
        report.result.after.kappa,
        report.result.before.eff_rank,
        report.result.after.eff_rank
    )?;
    writeln!(txt, "retained: {}", report.result.retained_names.join(", "))?;
    write_file(&out_dir.join("dedup.txt"), &txt)?;
    Ok(())
}
