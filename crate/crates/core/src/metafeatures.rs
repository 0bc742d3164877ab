//! Meta-feature augmentation: the retained prediction columns plus six
//! per-row ensemble statistics (mean, population std, median, range, and
//! the two interactions mean·std and range·std).

use crate::error::{Error, Result};
use crate::types::PredictionMatrix;

pub const META_FEATURE_NAMES: [&str; 6] =
    ["mean", "std", "median", "range", "mean_std_interaction", "range_std_interaction"];

/// Meta-design matrix: K_eff retained columns followed by the six
/// engineered features, column-major.
#[derive(Debug, Clone)]
pub struct MetaDesign {
    pub column_names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub n_rows: usize,
    pub n_models: usize,
}

impl MetaDesign {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// True if column `j` is one of the four statistical aggregates.
    pub fn is_statistical(&self, j: usize) -> bool {
        j >= self.n_models && j < self.n_models + 4
    }

    /// True if column `j` is one of the two interaction features.
    pub fn is_interaction(&self, j: usize) -> bool {
        j >= self.n_models + 4
    }
}

/// Appends the six ensemble statistics to the retained columns.
///
/// The std divides by K_eff (population form), and an even model count
/// takes the midpoint of the two central order statistics for the median.
/// With a single retained model the std and range columns are constant
/// zero; downstream standardization maps them to zeros rather than
/// dividing by zero.
pub fn augment(retained: &PredictionMatrix) -> Result<MetaDesign> {
    let k = retained.n_cols();
    if k == 0 {
        return Err(Error::Selection("cannot augment an empty selection".into()));
    }
    let n = retained.n_rows();

    let mut mean = vec![0.0f64; n];
    let mut std = vec![0.0f64; n];
    let mut median = vec![0.0f64; n];
    let mut range = vec![0.0f64; n];
    let mut phi1 = vec![0.0f64; n];
    let mut phi2 = vec![0.0f64; n];

    let mut row = vec![0.0f64; k];
    for i in 0..n {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = retained.col(j)[i];
        }
        let mu = row.iter().sum::<f64>() / k as f64;
        let var = row.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / k as f64;
        let sigma = var.sqrt();

        let mut sorted = row.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        let r = sorted[k - 1] - sorted[0];

        mean[i] = mu;
        std[i] = sigma;
        median[i] = m;
        range[i] = r;
        phi1[i] = mu * sigma;
        phi2[i] = r * sigma;
    }

    let mut column_names: Vec<String> = retained.names().to_vec();
    column_names.extend(META_FEATURE_NAMES.iter().map(|s| s.to_string()));
    let mut columns: Vec<Vec<f64>> = retained.columns().to_vec();
    columns.push(mean);
    columns.push(std);
    columns.push(median);
    columns.push(range);
    columns.push(phi1);
    columns.push(phi2);

    Ok(MetaDesign { column_names, columns, n_rows: n, n_models: k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design_of(rows: Vec<Vec<f64>>, k: usize) -> MetaDesign {
        let n = rows.len();
        let cols: Vec<(String, Vec<f64>)> = (0..k)
            .map(|j| (format!("m{j}"), (0..n).map(|i| rows[i][j]).collect()))
            .collect();
        augment(&PredictionMatrix::new(cols).unwrap()).unwrap()
    }

    #[test]
    fn constant_row_collapses() {
        let d = design_of(vec![vec![5.0, 5.0, 5.0], vec![5.0, 5.0, 5.0]], 3);
        let feats: Vec<f64> = (3..9).map(|j| d.columns[j][0]).collect();
        assert_eq!(feats, vec![5.0, 0.0, 5.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn hand_computed_row() {
        let d = design_of(vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]], 3);
        let sigma = (2.0f64 / 3.0).sqrt();
        assert!((d.columns[3][0] - 2.0).abs() < 1e-12);
        assert!((d.columns[4][0] - sigma).abs() < 1e-12);
        assert!((d.columns[5][0] - 2.0).abs() < 1e-12);
        assert!((d.columns[6][0] - 2.0).abs() < 1e-12);
        assert!((d.columns[7][0] - 2.0 * sigma).abs() < 1e-12);
        assert!((d.columns[8][0] - 2.0 * sigma).abs() < 1e-12);
    }

    #[test]
    fn width_is_k_eff_plus_six() {
        for k in [1usize, 2, 5, 37] {
            let rows = vec![(0..k).map(|j| j as f64).collect::<Vec<f64>>(); 2];
            let d = design_of(rows, k);
            assert_eq!(d.width(), k + 6);
            assert_eq!(d.column_names[k..], META_FEATURE_NAMES.map(String::from));
        }
    }

    #[test]
    fn even_count_median_is_midpoint() {
        let d = design_of(vec![vec![1.0, 4.0, 2.0, 10.0], vec![0.0, 0.0, 0.0, 0.0]], 4);
        assert!((d.columns[4 + 2][0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_model_emits_zero_columns() {
        let d = design_of(vec![vec![2.5], vec![3.5]], 1);
        assert_eq!(d.width(), 7);
        assert_eq!(d.columns[2], vec![0.0, 0.0]); // std
        assert_eq!(d.columns[4], vec![0.0, 0.0]); // range
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn row_statistics_are_internally_consistent(
                rows in proptest::collection::vec(
                    proptest::collection::vec(-50.0..50.0f64, 5), 3),
            ) {
                let d = design_of(rows.clone(), 5);
                for (i, row) in rows.iter().enumerate() {
                    let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let m = d.columns[5 + 2][i];
                    let r = d.columns[5 + 3][i];
                    let s = d.columns[5 + 1][i];
                    prop_assert!(lo <= m + 1e-12 && m <= hi + 1e-12);
                    prop_assert!(r >= 0.0 && s >= 0.0);
                    prop_assert_eq!(s == 0.0, r == 0.0);
                    // mean matches the uniform average over retained models
                    let mu: f64 = row.iter().sum::<f64>() / 5.0;
                    prop_assert!((d.columns[5][i] - mu).abs() < 1e-12);
                }
            }
        }
    }
}
