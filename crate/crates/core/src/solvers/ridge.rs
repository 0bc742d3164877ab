//! Closed-form ridge regression.
//!
//! Solves (XᵀX + n·λ·I)w = Xᵀy on centered data via Cholesky; the
//! intercept stays unpenalized through the centering.

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;

/// Weights plus intercept of a fitted linear model.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearFit {
    pub fn predict(&self, cols: &[Vec<f64>]) -> Vec<f64> {
        let n = cols.first().map_or(0, |c| c.len());
        (0..n)
            .map(|i| {
                self.intercept
                    + cols.iter().zip(&self.weights).map(|(c, w)| c[i] * w).sum::<f64>()
            })
            .collect()
    }

    pub fn predict_rows(&self, cols: &[Vec<f64>], rows: &[usize]) -> Vec<f64> {
        rows.iter()
            .map(|&i| {
                self.intercept
                    + cols.iter().zip(&self.weights).map(|(c, w)| c[i] * w).sum::<f64>()
            })
            .collect()
    }
}

/// Centered normal-equation system, reusable across λ values.
#[derive(Debug)]
pub struct RidgeSystem {
    gram: Vec<Vec<f64>>,
    xty: Vec<f64>,
    x_means: Vec<f64>,
    y_mean: f64,
    n: usize,
}

impl RidgeSystem {
    pub fn build(cols: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let d = cols.len();
        if d == 0 {
            return Err(Error::Dimension("design matrix has no columns".into()));
        }
        let n = y.len();
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("design columns must match the target length".into()));
        }
        let nf = n as f64;
        let x_means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / nf).collect();
        let y_mean = y.iter().sum::<f64>() / nf;

        let mut gram = vec![vec![0.0f64; d]; d];
        let mut xty = vec![0.0f64; d];
        for j in 0..d {
            for k in j..d {
                let mut s = 0.0;
                for i in 0..n {
                    s += (cols[j][i] - x_means[j]) * (cols[k][i] - x_means[k]);
                }
                gram[j][k] = s;
                gram[k][j] = s;
            }
            xty[j] = cols[j].iter().zip(y).map(|(&x, &v)| (x - x_means[j]) * (v - y_mean)).sum();
        }
        Ok(Self { gram, xty, x_means, y_mean, n })
    }

    pub fn solve(&self, lambda: f64) -> Result<LinearFit> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
        }
        let shift = self.n as f64 * lambda;
        let mut a = self.gram.clone();
        for (j, row) in a.iter_mut().enumerate() {
            row[j] += shift;
        }
        let weights = cholesky_solve(&a, &self.xty).map_err(|e| match e {
            Error::Singular(m) if lambda == 0.0 => Error::Singular(format!(
                "{m}; the unpenalized system is singular, set lambda > 0"
            )),
            other => other,
        })?;
        let intercept =
            self.y_mean - weights.iter().zip(&self.x_means).map(|(w, m)| w * m).sum::<f64>();
        Ok(LinearFit { weights, intercept })
    }
}

/// Ridge fit at a single λ.
pub fn fit_ridge(cols: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<LinearFit> {
    RidgeSystem::build(cols, y)?.solve(lambda)
}
