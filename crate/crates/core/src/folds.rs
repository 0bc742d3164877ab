//! Stratified L-fold partitioning for a continuous target.
//!
//! Stratification uses quantile binning: samples are sorted by target
//! value, cut into `n_bins` near-equal bins, shuffled within each bin,
//! and dealt round-robin onto folds with a counter that carries across
//! bins so fold sizes stay globally balanced as well as per-stratum.

use crate::error::{Error, Result};
use crate::seeding;
use rand::seq::SliceRandom;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    n_folds: usize,
}

impl FoldAssignment {
    /// Builds an assignment from explicit per-sample fold indices.
    pub fn new(fold_of: Vec<usize>, n_folds: usize) -> Result<Self> {
        if n_folds < 2 {
            return Err(Error::Partition(format!("need at least 2 folds, got {n_folds}")));
        }
        let mut counts = vec![0usize; n_folds];
        for (i, &f) in fold_of.iter().enumerate() {
            if f >= n_folds {
                return Err(Error::Partition(format!("sample {i} assigned to out-of-range fold {f}")));
            }
            counts[f] += 1;
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::Partition("every fold must be nonempty".into()));
        }
        Ok(Self { fold_of, n_folds })
    }

    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    pub fn fold_of(&self, i: usize) -> usize {
        self.fold_of[i]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.fold_of
    }

    /// Row indices of fold `f`, ascending.
    pub fn validation_indices(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == f).collect()
    }

    /// Row indices outside fold `f`, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != f).collect()
    }
}

/// Partitions samples into `l` folds stratified over `n_bins` quantile
/// bins of the target. Deterministic given (target, l, n_bins, seed).
pub fn stratified_partition(
    target: &[f64],
    l: usize,
    n_bins: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    let n = target.len();
    if l < 2 {
        return Err(Error::Partition(format!("need at least 2 folds, got {l}")));
    }
    if n < l {
        return Err(Error::Partition(format!("{n} samples cannot fill {l} folds")));
    }
    if n_bins == 0 {
        return Err(Error::Partition("n_bins must be at least 1".into()));
    }

    // sort by target value, index as tie-break, then cut into near-equal bins
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| target[a].partial_cmp(&target[b]).unwrap().then(a.cmp(&b)));

    let n_bins = n_bins.min(n);
    let base = n / n_bins;
    let extra = n % n_bins;

    let mut rng = seeding::rng(seed, &[0x0F01D5, l as u64, n_bins as u64]);
    let mut fold_of = vec![0usize; n];
    let mut counter = 0usize;
    let mut start = 0usize;
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        let mut bin: Vec<usize> = order[start..start + size].to_vec();
        bin.shuffle(&mut rng);
        for idx in bin {
            fold_of[idx] = counter % l;
            counter += 1;
        }
        start += size;
    }
    FoldAssignment::new(fold_of, l)
}
