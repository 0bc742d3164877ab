//! TOML configuration file and flag merging.
//!
//! Unknown keys are rejected; missing keys fall back to the built-in
//! defaults; command-line flags win over the file. The resolved
//! configuration is echoed into every report, so runs are
//! self-describing.

use crate::args::PipelineFlags;
use anyhow::{bail, Context, Result};
use restack_core::pipeline::{BaselineKind, PipelineConfig};
use restack_core::solvers::{log_space, Grid, PenaltyKind};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub n_bins: Option<usize>,
    pub tau_corr: Option<f64>,
    pub tau_mse: Option<f64>,
    pub tau_var: Option<f64>,
    pub meta: Option<Vec<String>>,
    pub baselines: Option<Vec<String>>,
    pub inner_folds: Option<usize>,
    pub vanilla_lambda: Option<f64>,
    pub hill_climb_max_steps: Option<usize>,
    pub hill_climb_patience: Option<usize>,
    pub alpha: Option<f64>,
    pub bootstrap_resamples: Option<usize>,
    pub bootstrap_level: Option<f64>,
    pub cd_tol: Option<f64>,
    pub cd_max_iter: Option<usize>,
    pub grids: Option<GridConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub ridge: Option<LogGrid>,
    pub lasso: Option<LogGrid>,
    pub elastic_alphas: Option<Vec<f64>>,
}

/// Log-spaced grid: `count` values over [10^min_exp, 10^max_exp].
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min_exp: f64,
    pub max_exp: f64,
    pub count: usize,
}

fn parse_meta(names: &[String]) -> Result<Vec<PenaltyKind>> {
    if names.is_empty() {
        bail!("meta-learner list is empty");
    }
    names.iter().map(|s| s.parse::<PenaltyKind>().map_err(Into::into)).collect()
}

fn parse_baselines(names: &[String]) -> Result<Vec<BaselineKind>> {
    if names.len() == 1 && names[0] == "all" {
        return Ok(BaselineKind::all());
    }
    if names.len() == 1 && names[0] == "none" {
        return Ok(Vec::new());
    }
    names.iter().map(|s| s.parse::<BaselineKind>().map_err(Into::into)).collect()
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let cfg: ConfigFile = toml::from_str(&text)
        .with_context(|| format!("invalid config file {}", path.display()))?;
    Ok(cfg)
}

/// Builds the effective pipeline configuration from defaults, an
/// optional config file, and command-line flags, in that order.
pub fn resolve(flags: &PipelineFlags) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();

    if let Some(path) = &flags.config {
        let file = load_config_file(path)?;
        if let Some(v) = file.folds {
            cfg.folds = v;
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
        if let Some(v) = file.n_bins {
            cfg.n_bins = Some(v);
        }
        if let Some(v) = file.tau_corr {
            cfg.tau_corr = v;
        }
        if let Some(v) = file.tau_mse {
            cfg.tau_mse = Some(v);
        }
        if let Some(v) = file.tau_var {
            cfg.tau_var = v;
        }
        if let Some(v) = &file.meta {
            cfg.meta_learners = parse_meta(v)?;
        }
        if let Some(v) = &file.baselines {
            cfg.baselines = parse_baselines(v)?;
        }
        if let Some(v) = file.inner_folds {
            cfg.inner_folds = v;
        }
        if let Some(v) = file.vanilla_lambda {
            cfg.vanilla_lambda = v;
        }
        if let Some(v) = file.hill_climb_max_steps {
            cfg.hill_climb_max_steps = v;
        }
        if let Some(v) = file.hill_climb_patience {
            cfg.hill_climb_patience = v;
        }
        if let Some(v) = file.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = file.bootstrap_resamples {
            cfg.bootstrap_resamples = v;
        }
        if let Some(v) = file.bootstrap_level {
            cfg.bootstrap_level = v;
        }
        if let Some(v) = file.cd_tol {
            cfg.cd_tol = v;
        }
        if let Some(v) = file.cd_max_iter {
            cfg.cd_max_iter = v;
        }
        if let Some(grids) = &file.grids {
            let mut grid = Grid::default();
            if let Some(r) = &grids.ridge {
                grid.ridge_lambdas = log_space(r.min_exp, r.max_exp, r.count);
            }
            if let Some(l) = &grids.lasso {
                grid.lasso_lambdas = log_space(l.min_exp, l.max_exp, l.count);
            }
            if let Some(a) = &grids.elastic_alphas {
                grid.elastic_alphas = a.clone();
            }
            cfg.grid = grid;
        }
    }

    if let Some(v) = flags.folds {
        cfg.folds = v;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = flags.tau_corr {
        cfg.tau_corr = v;
    }
    if let Some(v) = flags.tau_mse {
        cfg.tau_mse = Some(v);
    }
    if let Some(v) = flags.tau_var {
        cfg.tau_var = v;
    }
    if let Some(v) = &flags.meta {
        cfg.meta_learners = parse_meta(v)?;
    }
    if let Some(v) = &flags.baselines {
        cfg.baselines = parse_baselines(v)?;
    }
    if let Some(v) = flags.inner_folds {
        cfg.inner_folds = v;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ConfigFile>("folds = 5\nnot_a_key = 1\n").unwrap_err();
        assert!(err.to_string().contains("not_a_key"));
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let file: ConfigFile = toml::from_str("folds = 5").unwrap();
        assert_eq!(file.folds, Some(5));
        assert!(file.seed.is_none());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join("restack_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.toml");
        std::fs::write(&path, "folds = 7\nseed = 9\n").unwrap();
        let flags = PipelineFlags {
            config: Some(path),
            folds: Some(3),
            ..PipelineFlags::default()
        };
        let cfg = resolve(&flags).unwrap();
        assert_eq!(cfg.folds, 3);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn grid_override_parses() {
        let file: ConfigFile = toml::from_str(
            "[grids]\nridge = { min_exp = -2.0, max_exp = 2.0, count = 5 }\nelastic_alphas = [0.5]\n",
        )
        .unwrap();
        let g = file.grids.unwrap();
        assert_eq!(g.ridge.unwrap().count, 5);
        assert_eq!(g.elastic_alphas.unwrap(), vec![0.5]);
    }
}
