//! Regularized linear meta-learners.
//!
//! All solvers minimize
//!
//! ```text
//! J(w, b) = (1/(2n)) · ‖y − Xw − b‖₂²  +  l1·‖w‖₁  +  l2·‖w‖₂²
//! ```
//!
//! with the intercept `b` unpenalized and handled by centering. The
//! user-facing penalties map onto (l1, l2) as
//!
//! * ridge(λ):          (0, λ/2)   — stationarity is (XᵀX + n·λ·I)w = Xᵀy
//! * lasso(λ):          (λ, 0)     — KKT: |xⱼᵀ(y − Xw)/n| ≤ λ
//! * elastic_net(λ, α): (α·λ, (1−α)·λ/2)
//!
//! so elastic_net(λ, 1) is exactly lasso(λ) and elastic_net(λ, 0) is
//! exactly ridge(λ). The 1/(2n) loss scaling keeps λ grids independent of
//! the sample count.

pub mod cd;
pub mod nested;
pub mod ridge;
pub mod standardize;

pub use cd::{fit_coordinate_descent, penalized_objective, CdFit, DEFAULT_CD_MAX_ITER, DEFAULT_CD_TOL};
pub use nested::{nested_cv_fit, FitResult, FoldFit, PathPoint};
pub use ridge::{fit_ridge, LinearFit};
pub use standardize::Standardizer;

use crate::error::{Error, Result};
use crate::metafeatures::MetaDesign;
use crate::types::PredictionMatrix;
use serde::{Deserialize, Serialize};

/// Which regularizer a meta-learner uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    Ridge,
    Lasso,
    ElasticNet,
}

impl PenaltyKind {
    pub fn label(&self) -> &'static str {
        match self {
            PenaltyKind::Ridge => "ridge",
            PenaltyKind::Lasso => "lasso",
            PenaltyKind::ElasticNet => "elasticnet",
        }
    }
}

impl std::str::FromStr for PenaltyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ridge" => Ok(PenaltyKind::Ridge),
            "lasso" => Ok(PenaltyKind::Lasso),
            "elasticnet" | "elastic_net" | "enet" => Ok(PenaltyKind::ElasticNet),
            other => Err(Error::Config(format!("unknown meta-learner '{other}'"))),
        }
    }
}

/// A concrete penalty: kind, strength, and (for elastic net) the mixing
/// parameter.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub lambda: f64,
    /// L1 share for elastic net; 1 for lasso, 0 for ridge.
    pub alpha: f64,
}

impl PenaltySpec {
    pub fn ridge(lambda: f64) -> Self {
        Self { kind: PenaltyKind::Ridge, lambda, alpha: 0.0 }
    }

    pub fn lasso(lambda: f64) -> Self {
        Self { kind: PenaltyKind::Lasso, lambda, alpha: 1.0 }
    }

    pub fn elastic_net(lambda: f64, alpha: f64) -> Self {
        Self { kind: PenaltyKind::ElasticNet, lambda, alpha }
    }

    /// L1 coefficient of the objective.
    pub fn l1(&self) -> f64 {
        match self.kind {
            PenaltyKind::Ridge => 0.0,
            PenaltyKind::Lasso => self.lambda,
            PenaltyKind::ElasticNet => self.alpha * self.lambda,
        }
    }

    /// L2 coefficient of the objective.
    pub fn l2(&self) -> f64 {
        match self.kind {
            PenaltyKind::Ridge => self.lambda / 2.0,
            PenaltyKind::Lasso => 0.0,
            PenaltyKind::ElasticNet => (1.0 - self.alpha) * self.lambda / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Hyperparameter search grids.
#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub ridge_lambdas: Vec<f64>,
    pub lasso_lambdas: Vec<f64>,
    pub elastic_alphas: Vec<f64>,
}

/// `count` log-spaced values over [10^lo_exp, 10^hi_exp], endpoints
/// inclusive.
pub fn log_space(lo_exp: f64, hi_exp: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![10f64.powf(lo_exp)];
    }
    (0..count)
        .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (count - 1) as f64))
        .collect()
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            ridge_lambdas: log_space(-3.0, 5.0, 50),
            lasso_lambdas: log_space(-5.0, 0.1, 30),
            elastic_alphas: vec![0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0],
        }
    }
}

impl Grid {
    /// Candidate penalties for a meta-learner kind, in canonical order
    /// (ascending α, then ascending λ).
    pub fn candidates(&self, kind: PenaltyKind) -> Vec<PenaltySpec> {
        match kind {
            PenaltyKind::Ridge => self.ridge_lambdas.iter().map(|&l| PenaltySpec::ridge(l)).collect(),
            PenaltyKind::Lasso => self.lasso_lambdas.iter().map(|&l| PenaltySpec::lasso(l)).collect(),
            PenaltyKind::ElasticNet => self
                .elastic_alphas
                .iter()
                .flat_map(|&a| self.lasso_lambdas.iter().map(move |&l| PenaltySpec::elastic_net(l, a)))
                .collect(),
        }
    }
}

/// A named design matrix handed to the solvers; column-major.
#[derive(Debug, Clone)]
pub struct Design {
    pub names: Vec<String>,
    pub cols: Vec<Vec<f64>>,
}

impl Design {
    pub fn n_rows(&self) -> usize {
        self.cols.first().map_or(0, |c| c.len())
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }
}

impl From<&MetaDesign> for Design {
    fn from(m: &MetaDesign) -> Self {
        Design { names: m.column_names.clone(), cols: m.columns.clone() }
    }
}

impl From<&PredictionMatrix> for Design {
    fn from(m: &PredictionMatrix) -> Self {
        Design { names: m.names().to_vec(), cols: m.columns().to_vec() }
    }
}
