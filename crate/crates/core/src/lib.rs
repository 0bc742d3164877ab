//! Redundancy-aware regularized stacking.
//!
//! Turns a pool of base-model out-of-fold predictions into a single
//! blended predictor: correlation/MSE de-duplication of near-redundant
//! models, per-row statistical meta-features, cross-validated ridge /
//! lasso / elastic-net meta-learners, and inverse-RMSE blending — with
//! spectral conditioning diagnostics, classic ensembling baselines, and
//! bootstrap / paired-t significance reporting.

pub mod ensemble;
pub mod error;
pub mod folds;
pub mod linalg;
pub mod metafeatures;
pub mod metrics;
pub mod oof;
pub mod pipeline;
pub mod redundancy;
pub mod seeding;
pub mod solvers;
pub mod stats;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use types::{FeatureMatrix, PredictionMatrix, TargetVector};
