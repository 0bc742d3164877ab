//! Subcommand implementations.

use crate::args::{AblateArgs, DedupArgs, RunArgs, SynthArgs};
use crate::config::resolve;
use crate::csv_io::{read_predictions, write_predictions};
use crate::report_io::{
    write_ablation_outputs, write_dedup_outputs, write_run_outputs, DedupReport,
};
use anyhow::{bail, Context, Result};
use restack_core::pipeline::{ablate, run, PipelineInput};
use restack_core::redundancy::{project, variance_prune, RedundancyConfig};
use restack_core::synth::{generate, SynthConfig};

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = resolve(&args.flags)?;
    let train = read_predictions(&args.predictions)?;
    let target = match &train.target {
        Some(t) => t,
        None => bail!("{}: target column required", args.predictions.display()),
    };
    let test = match &args.test {
        Some(path) => Some(read_predictions(path)?),
        None => None,
    };
    let outcome = run(
        &PipelineInput {
            pool: &train.pool,
            target,
            test: test.as_ref().map(|t| &t.pool),
        },
        &cfg,
    )?;
    write_run_outputs(
        &args.out,
        &outcome,
        target.values(),
        test.as_ref().map(|t| t.ids.as_slice()),
    )?;
    println!(
        "wrote report for {} samples x {} models ({} retained) to {}",
        outcome.report.n_samples,
        outcome.report.n_models_input,
        outcome.selection.k_eff,
        args.out.display()
    );
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        n_samples: args.n_samples,
        n_clusters: args.clusters,
        models_per_cluster: args.models_per_cluster,
        noise: args.noise,
        rho_within: args.rho_within,
        seed: args.seed,
    };
    let data = generate(&cfg)?;
    let ids: Vec<String> = (0..data.target.len()).map(|i| i.to_string()).collect();
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
    }
    write_predictions(&args.out, &ids, Some(&data.target), &data.pool)?;
    println!(
        "wrote {} samples x {} models ({} clusters x {}) to {}",
        cfg.n_samples,
        data.pool.n_cols(),
        cfg.n_clusters,
        cfg.models_per_cluster,
        args.out.display()
    );
    Ok(())
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let cfg = resolve(&args.flags)?;
    let train = read_predictions(&args.predictions)?;
    let target = match &train.target {
        Some(t) => t,
        None => bail!("{}: target column required", args.predictions.display()),
    };
    let rows = ablate(&train.pool, target, &cfg)?;
    write_ablation_outputs(&args.out, &rows)?;
    println!("wrote {}-row ablation to {}", rows.len(), args.out.display());
    Ok(())
}

pub fn cmd_dedup(args: &DedupArgs) -> Result<()> {
    let cfg = resolve(&args.flags)?;
    let train = read_predictions(&args.predictions)?;
    let target = match &train.target {
        Some(t) => t,
        None => bail!("{}: target column required", args.predictions.display()),
    };
    let tau_mse = cfg.tau_mse.unwrap_or(0.05 * target.variance());
    let red_cfg = RedundancyConfig::new(cfg.tau_corr, tau_mse, cfg.tau_var)?;
    let (pruned, variance_removed) = variance_prune(&train.pool, cfg.tau_var)?;
    let result = project(&pruned, target, &red_cfg)?;
    let report = DedupReport {
        tau_corr: cfg.tau_corr,
        tau_mse,
        tau_var: cfg.tau_var,
        n_input: train.pool.n_cols(),
        variance_removed,
        result,
    };
    write_dedup_outputs(&args.out, &report)?;
    println!(
        "retained {} of {} models; log in {}",
        report.result.k_eff,
        report.n_input,
        args.out.display()
    );
    Ok(())
}
