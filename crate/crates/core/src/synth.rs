//! Synthetic clustered prediction pools.
//!
//! Columns are built as target + cluster-shared noise + model-private
//! noise, which gives direct control over within-cluster correlation.
//! Two deliberate asymmetries make the pools realistic test subjects:
//! cluster noise scales spread over [0.7, 1.3] of the base level (so
//! model quality varies across clusters and weighting matters), and
//! private noise grows with the model index inside a cluster (so each
//! cluster has a strict best member for de-duplication to find).

use crate::error::{Error, Result};
use crate::seeding;
use crate::types::{PredictionMatrix, TargetVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const TARGET_MEAN: f64 = 50.0;
pub const TARGET_STD: f64 = 15.0;
/// Per-model private-noise variance multiplier: 1 + j·PRIVATE_VAR_STEP.
const PRIVATE_VAR_STEP: f64 = 1.25;
/// Cluster noise scale runs from 1−SCALE_SPREAD to 1+SCALE_SPREAD.
const SCALE_SPREAD: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct SynthConfig {
    pub n_samples: usize,
    pub n_clusters: usize,
    pub models_per_cluster: usize,
    /// Base noise std as a fraction of the target std.
    pub noise: f64,
    /// Share of noise variance common to a cluster, in [0, 1].
    pub rho_within: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_samples: 5000,
            n_clusters: 4,
            models_per_cluster: 5,
            noise: 0.5,
            rho_within: 0.99,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub target: TargetVector,
    pub pool: PredictionMatrix,
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    if cfg.n_samples < 2 {
        return Err(Error::Config("n_samples must be at least 2".into()));
    }
    if cfg.n_clusters == 0 || cfg.models_per_cluster == 0 {
        return Err(Error::Config("need at least one cluster and one model".into()));
    }
    if !(0.0..=1.0).contains(&cfg.rho_within) {
        return Err(Error::Config(format!("rho_within must be in [0, 1], got {}", cfg.rho_within)));
    }
    if !(cfg.noise >= 0.0 && cfg.noise.is_finite()) {
        return Err(Error::Config(format!("noise must be nonnegative, got {}", cfg.noise)));
    }

    let n = cfg.n_samples;
    let mut rng = seeding::rng(cfg.seed, &[0x5217]);
    let y: Vec<f64> = (0..n).map(|_| TARGET_MEAN + TARGET_STD * gaussian(&mut rng)).collect();

    let mut columns = Vec::with_capacity(cfg.n_clusters * cfg.models_per_cluster);
    for c in 0..cfg.n_clusters {
        let cluster_scale = if cfg.n_clusters == 1 {
            1.0
        } else {
            1.0 - SCALE_SPREAD + 2.0 * SCALE_SPREAD * c as f64 / (cfg.n_clusters - 1) as f64
        };
        let sigma = cfg.noise * TARGET_STD * cluster_scale;
        let sigma_shared = (cfg.rho_within).sqrt() * sigma;
        let sigma_private_base = (1.0 - cfg.rho_within).sqrt() * sigma;

        let mut cluster_rng = seeding::rng(cfg.seed, &[0x5217, 1, c as u64]);
        let shared: Vec<f64> = (0..n).map(|_| sigma_shared * gaussian(&mut cluster_rng)).collect();
        for j in 0..cfg.models_per_cluster {
            let sigma_private = sigma_private_base * (1.0 + PRIVATE_VAR_STEP * j as f64).sqrt();
            let mut model_rng = seeding::rng(cfg.seed, &[0x5217, 2, c as u64, j as u64]);
            let col: Vec<f64> = (0..n)
                .map(|i| y[i] + shared[i] + sigma_private * gaussian(&mut model_rng))
                .collect();
            columns.push((format!("c{c:02}_m{j:02}"), col));
        }
    }

    Ok(SynthData {
        target: TargetVector::new(y, "target")?,
        pool: PredictionMatrix::new(columns)?,
    })
}
