//! Within-fold feature standardization.
//!
//! Statistics are fit on training rows only; zero-variance columns are
//! flagged and transform to all-zeros instead of dividing by zero.

#[derive(Debug, Clone)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub zero_var: Vec<bool>,
}

impl Standardizer {
    /// Column means and population stds over the given rows.
    pub fn fit(cols: &[Vec<f64>], rows: &[usize]) -> Self {
        let n = rows.len() as f64;
        let mut means = Vec::with_capacity(cols.len());
        let mut stds = Vec::with_capacity(cols.len());
        let mut zero_var = Vec::with_capacity(cols.len());
        for col in cols {
            let mean = rows.iter().map(|&i| col[i]).sum::<f64>() / n;
            let var = rows.iter().map(|&i| (col[i] - mean) * (col[i] - mean)).sum::<f64>() / n;
            let std = var.sqrt();
            means.push(mean);
            stds.push(std);
            zero_var.push(std == 0.0);
        }
        Self { means, stds, zero_var }
    }

    /// Standardized value of column `j` at raw value `v`.
    #[inline]
    pub fn scale(&self, j: usize, v: f64) -> f64 {
        if self.zero_var[j] {
            0.0
        } else {
            (v - self.means[j]) / self.stds[j]
        }
    }

    /// Standardized copies of the given rows, column-major.
    pub fn transform(&self, cols: &[Vec<f64>], rows: &[usize]) -> Vec<Vec<f64>> {
        cols.iter()
            .enumerate()
            .map(|(j, col)| rows.iter().map(|&i| self.scale(j, col[i])).collect())
            .collect()
    }

    /// Row-wise linear prediction on raw inputs: intercept + w·scale(x).
    pub fn predict_rows(
        &self,
        cols: &[Vec<f64>],
        rows: &[usize],
        weights: &[f64],
        intercept: f64,
    ) -> Vec<f64> {
        rows.iter()
            .map(|&i| {
                intercept
                    + cols
                        .iter()
                        .enumerate()
                        .map(|(j, col)| weights[j] * self.scale(j, col[i]))
                        .sum::<f64>()
            })
            .collect()
    }
}
