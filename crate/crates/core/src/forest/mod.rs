//! Random forests (bagged CART trees) and the seven-model score suite.
//!
//! A model's score for an account is the mean over its trees of the positive
//! (bot) fraction in the leaf the account lands in. It is a raw ensemble
//! fraction, not a calibrated probability.

mod codec;
mod suite;
pub mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureVector;

pub use codec::{decode_forest, encode_forest};
pub use suite::{score_suite, train_suite, ScoreSuiteModel, Scores, SuiteMeta};
pub use tree::{best_split, gini_impurity, Split, TreeNode};

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("gini impurity of an empty node")]
    EmptyNode,
    #[error("training data must contain both bots and humans")]
    SingleClass,
    #[error("feature vector built for registry {found}, model expects {expected}")]
    RegistryMismatch { expected: String, found: String },
    #[error("{0} feature vectors but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid forest parameters: {0}")]
    InvalidParams(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("cannot read model file {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means ⌊√d⌋ (at least 1).
    pub max_features: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub rng_seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_features: None,
            min_samples_leaf: 1,
            max_depth: None,
            bootstrap: true,
            rng_seed: 0,
        }
    }
}

impl ForestParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Resolves `max_features` against `d` features and checks ranges.
    pub fn resolve(&self, d: usize) -> Result<ForestParams, ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::InvalidParams("n_trees must be at least 1".into()));
        }
        if d == 0 {
            return Err(ForestError::InvalidParams("no features to train on".into()));
        }
        let mf = self
            .max_features
            .unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1));
        if mf == 0 || mf > d {
            return Err(ForestError::InvalidParams(format!(
                "max_features {mf} outside 1..={d}"
            )));
        }
        Ok(ForestParams {
            max_features: Some(mf),
            min_samples_leaf: self.min_samples_leaf.max(1),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    /// Resolved parameters (`max_features` always set).
    pub params: ForestParams,
    /// Training median per subset feature, substituted for missing values.
    pub imputation: Vec<f64>,
    pub registry_version: String,
    /// Registry positions this model reads, ascending.
    pub feature_subset: Vec<usize>,
}

/// Per-feature median of the non-missing values; 0 when none are present.
pub fn imputation_medians(columns: &[Vec<f64>]) -> Vec<f64> {
    columns
        .iter()
        .map(|col| {
            let mut present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
            if present.is_empty() {
                return 0.0;
            }
            present.sort_by(f64::total_cmp);
            let m = present.len() / 2;
            if present.len() % 2 == 1 {
                present[m]
            } else {
                (present[m - 1] + present[m]) / 2.0
            }
        })
        .collect()
}

fn check_inputs(x: &[FeatureVector], y: &[bool]) -> Result<String, ForestError> {
    if x.len() != y.len() {
        return Err(ForestError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(ForestError::TooFewSamples(x.len()));
    }
    if y.iter().all(|&b| b) || y.iter().all(|&b| !b) {
        return Err(ForestError::SingleClass);
    }
    let version = x[0].registry_version.clone();
    let width = x[0].values.len();
    for v in x {
        if v.registry_version != version || v.values.len() != width {
            return Err(ForestError::RegistryMismatch {
                expected: version,
                found: v.registry_version.clone(),
            });
        }
    }
    Ok(version)
}

/// Trains on every feature of the vectors.
pub fn train_forest(
    x: &[FeatureVector],
    y: &[bool],
    params: &ForestParams,
) -> Result<ForestModel, ForestError> {
    let width = x.first().map_or(0, |v| v.values.len());
    train_forest_on(x, y, params, (0..width).collect())
}

/// Trains on the registry positions in `subset` only.
pub fn train_forest_on(
    x: &[FeatureVector],
    y: &[bool],
    params: &ForestParams,
    subset: Vec<usize>,
) -> Result<ForestModel, ForestError> {
    let registry_version = check_inputs(x, y)?;
    let params = params.resolve(subset.len())?;
    let mut columns: Vec<Vec<f64>> = subset
        .iter()
        .map(|&f| x.iter().map(|v| v.values[f]).collect())
        .collect();
    let imputation = imputation_medians(&columns);
    for (col, fill) in columns.iter_mut().zip(&imputation) {
        for v in col.iter_mut().filter(|v| v.is_nan()) {
            *v = *fill;
        }
    }
    let cfg = tree::GrowConfig {
        max_features: params.max_features.unwrap(),
        min_samples_leaf: params.min_samples_leaf,
        max_depth: params.max_depth,
    };
    let n = y.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.rng_seed, t as u64);
            let indices: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            tree::grow(&columns, y, indices, &cfg, &mut rng)
        })
        .collect();
    Ok(ForestModel {
        trees,
        params,
        imputation,
        registry_version,
        feature_subset: subset,
    })
}

/// Independent ChaCha stream per tree: the seed picks the key, the tree
/// index the stream.
fn tree_rng(seed: u64, tree: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree);
    rng
}

impl ForestModel {
    /// Subset values of `x` with missing entries imputed.
    fn project(&self, x: &FeatureVector) -> Result<Vec<f64>, ForestError> {
        if x.registry_version != self.registry_version {
            return Err(ForestError::RegistryMismatch {
                expected: self.registry_version.clone(),
                found: x.registry_version.clone(),
            });
        }
        let max = self.feature_subset.iter().copied().max().unwrap_or(0);
        if x.values.len() <= max {
            return Err(ForestError::RegistryMismatch {
                expected: self.registry_version.clone(),
                found: format!("{} (only {} values)", x.registry_version, x.values.len()),
            });
        }
        Ok(self
            .feature_subset
            .iter()
            .zip(&self.imputation)
            .map(|(&f, &fill)| {
                let v = x.values[f];
                if v.is_nan() {
                    fill
                } else {
                    v
                }
            })
            .collect())
    }

    pub fn predict_score(&self, x: &FeatureVector) -> Result<f64, ForestError> {
        let row = self.project(x)?;
        let sum: f64 = self.trees.iter().map(|t| t.predict(&row)).sum();
        Ok((sum / self.trees.len() as f64).clamp(0.0, 1.0))
    }

    /// Out-of-bag accuracy at a 0.5 cut, recomputing each tree's bootstrap
    /// sample from its seed. `None` when no sample was ever out of bag.
    pub fn oob_accuracy(&self, x: &[FeatureVector], y: &[bool]) -> Option<f64> {
        if !self.params.bootstrap {
            return None;
        }
        let n = y.len();
        let rows: Vec<Vec<f64>> = x.iter().map(|v| self.project(v).ok()).collect::<Option<_>>()?;
        let mut sums = vec![0.0; n];
        let mut counts = vec![0usize; n];
        for (t, tree) in self.trees.iter().enumerate() {
            let mut rng = tree_rng(self.params.rng_seed, t as u64);
            let mut in_bag = vec![false; n];
            for _ in 0..n {
                in_bag[rng.random_range(0..n)] = true;
            }
            for i in (0..n).filter(|&i| !in_bag[i]) {
                sums[i] += tree.predict(&rows[i]);
                counts[i] += 1;
            }
        }
        let scored: Vec<usize> = (0..n).filter(|&i| counts[i] > 0).collect();
        if scored.is_empty() {
            return None;
        }
        let correct = scored
            .iter()
            .filter(|&&i| (sums[i] / counts[i] as f64 >= 0.5) == y[i])
            .count();
        Some(correct as f64 / scored.len() as f64)
    }
}
