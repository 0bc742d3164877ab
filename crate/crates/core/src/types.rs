//! Core value types: named targets, prediction pools, and feature matrices.
//!
//! All types validate at construction (finite entries, consistent shapes)
//! and are immutable afterwards, so they are safe to share across threads.

use crate::error::{Error, Result};
use serde::Serialize;

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{what} contains {} at index {i}", values[i])));
    }
    Ok(())
}

/// Regression target aligned to the rows of a [`PredictionMatrix`].
#[derive(Debug, Clone, Serialize)]
pub struct TargetVector {
    values: Vec<f64>,
    name: String,
}

impl TargetVector {
    pub fn new(values: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Dimension(format!(
                "target needs at least 2 samples, got {}",
                values.len()
            )));
        }
        check_finite(&values, "target")?;
        Ok(Self { values, name: name.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Population variance of the target.
    pub fn variance(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
    }
}

/// Column-named matrix of base-model predictions; one column per model,
/// all columns aligned to the same sample rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
    n_rows: usize,
}

impl PredictionMatrix {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Selection("prediction matrix needs at least one column".into()));
        }
        let n_rows = columns[0].1.len();
        if n_rows == 0 {
            return Err(Error::Dimension("prediction columns must be nonempty".into()));
        }
        let mut names = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        for (name, values) in columns {
            if values.len() != n_rows {
                return Err(Error::Dimension(format!(
                    "column '{name}' has {} rows, expected {n_rows}",
                    values.len()
                )));
            }
            check_finite(&values, &format!("column '{name}'"))?;
            if names.contains(&name) {
                return Err(Error::Dimension(format!("duplicate model name '{name}'")));
            }
            names.push(name);
            cols.push(values);
        }
        Ok(Self { names, cols, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    /// New matrix holding the given columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<PredictionMatrix> {
        let columns = indices
            .iter()
            .map(|&j| (self.names[j].clone(), self.cols[j].clone()))
            .collect();
        PredictionMatrix::new(columns)
    }

    /// Population variance of column `j`.
    pub fn col_variance(&self, j: usize) -> f64 {
        let col = &self.cols[j];
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
    }
}

/// Row-major feature matrix fed to base predictors.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("feature matrix needs at least one row".into()));
        }
        let n_cols = rows[0].len();
        if n_cols == 0 {
            return Err(Error::Dimension("feature rows must be nonempty".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Dimension(format!(
                    "feature row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            check_finite(row, &format!("feature row {i}"))?;
            data.extend_from_slice(row);
        }
        Ok(Self { data, n_rows: rows.len(), n_cols })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.data[i * self.n_cols + j]).collect()
    }

    /// Rows `indices` as a new matrix.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix { data, n_rows: indices.len(), n_cols: self.n_cols }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_rejects_non_finite() {
        let err = TargetVector::new(vec![1.0, f64::NAN], "y").unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn target_rejects_too_short() {
        assert!(TargetVector::new(vec![1.0], "y").is_err());
    }

    #[test]
    fn matrix_rejects_ragged_columns() {
        let err = PredictionMatrix::new(vec![
            ("a".into(), vec![1.0, 2.0]),
            ("b".into(), vec![1.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn matrix_rejects_duplicate_names() {
        let err = PredictionMatrix::new(vec![
            ("a".into(), vec![1.0, 2.0]),
            ("a".into(), vec![3.0, 4.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn select_preserves_order() {
        let m = PredictionMatrix::new(vec![
            ("a".into(), vec![1.0, 2.0]),
            ("b".into(), vec![3.0, 4.0]),
            ("c".into(), vec![5.0, 6.0]),
        ])
        .unwrap();
        let s = m.select(&[2, 0]).unwrap();
        assert_eq!(s.names(), &["c".to_string(), "a".to_string()]);
        assert_eq!(s.col(0), &[5.0, 6.0]);
    }

    #[test]
    fn feature_matrix_round_trip() {
        let f = FeatureMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(f.row(1), &[3.0, 4.0]);
        assert_eq!(f.col(1), vec![2.0, 4.0, 6.0]);
        let sub = f.subset(&[2, 0]);
        assert_eq!(sub.row(0), &[5.0, 6.0]);
    }
}
