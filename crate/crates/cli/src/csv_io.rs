//! CSV ingestion and emission for prediction pools.
//!
//! Layout: header `id[,target],model...`; the first column is the sample
//! id, a second column literally named `target` marks a training file,
//! and every remaining column is one model's predictions. Floats are
//! written with Rust's shortest round-trip formatting, so write-then-read
//! is value-identical.

use anyhow::{bail, Context, Result};
use restack_core::{PredictionMatrix, TargetVector};
use std::path::Path;

#[derive(Debug)]
pub struct PredictionsFile {
    pub ids: Vec<String>,
    pub target: Option<TargetVector>,
    pub pool: PredictionMatrix,
}

pub fn read_predictions(path: &Path) -> Result<PredictionsFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .with_context(|| format!("cannot read header of {}", path.display()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if headers.len() < 2 {
        bail!("{}: need an id column plus at least one model column", path.display());
    }
    for (i, h) in headers.iter().enumerate() {
        if h.is_empty() {
            bail!("{}: empty header name in column {i}", path.display());
        }
        if headers[..i].contains(h) {
            bail!("{}: duplicate header name '{h}'", path.display());
        }
    }
    let has_target = headers[1] == "target";
    let first_model = if has_target { 2 } else { 1 };
    if headers.len() == first_model {
        bail!("{}: no model columns after {}", path.display(), headers[..first_model].join(","));
    }

    let mut ids = Vec::new();
    let mut target_vals: Vec<f64> = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len() - first_model];
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{} row {}", path.display(), row + 2))?;
        if record.len() != headers.len() {
            bail!(
                "{} row {}: {} cells for {} header columns",
                path.display(),
                row + 2,
                record.len(),
                headers.len()
            );
        }
        ids.push(record[0].to_string());
        let cell = |j: usize| -> Result<f64> {
            record[j].parse::<f64>().with_context(|| {
                format!(
                    "{} row {}: column '{}' is not numeric: '{}'",
                    path.display(),
                    row + 2,
                    headers[j],
                    &record[j]
                )
            })
        };
        if has_target {
            target_vals.push(cell(1)?);
        }
        for j in first_model..headers.len() {
            cols[j - first_model].push(cell(j)?);
        }
    }
    if ids.is_empty() {
        bail!("{}: no data rows", path.display());
    }

    let pool = PredictionMatrix::new(
        headers[first_model..]
            .iter()
            .cloned()
            .zip(cols)
            .collect(),
    )
    .with_context(|| format!("{}: invalid prediction pool", path.display()))?;
    let target = if has_target {
        Some(
            TargetVector::new(target_vals, "target")
                .with_context(|| format!("{}: invalid target column", path.display()))?,
        )
    } else {
        None
    };
    Ok(PredictionsFile { ids, target, pool })
}

pub fn write_predictions(
    path: &Path,
    ids: &[String],
    target: Option<&TargetVector>,
    pool: &PredictionMatrix,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header = vec!["id".to_string()];
    if target.is_some() {
        header.push("target".to_string());
    }
    header.extend(pool.names().iter().cloned());
    writer.write_record(&header)?;
    for i in 0..pool.n_rows() {
        let mut row = vec![ids[i].clone()];
        if let Some(t) = target {
            row.push(format!("{}", t.values()[i]));
        }
        for j in 0..pool.n_cols() {
            row.push(format!("{}", pool.col(j)[i]));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
