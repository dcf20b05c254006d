//! Stratified k-fold cross-validation and ROC/AUC.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureClass, FeatureRegistry, FeatureVector};
use crate::forest::{score_suite, train_suite, ForestError, ForestParams};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("each class needs at least {k} members for {k} folds (bots {pos}, humans {neg})")]
    TooFewSamples { k: usize, pos: usize, neg: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("ROC analysis needs both positive and negative labels")]
    SingleClass,
    #[error("{0} scores but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("score {0} is not a number")]
    NanScore(usize),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Partitions indices into `k` folds, dealing each class round-robin after a
/// seeded shuffle. Positives continue the deal where negatives stopped so fold
/// sizes differ by at most one.
pub fn stratified_kfold(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidK(k));
    }
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    if pos.len() < k || neg.len() < k {
        return Err(EvalError::TooFewSamples {
            k,
            pos: pos.len(),
            neg: neg.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    neg.shuffle(&mut rng);
    pos.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (slot, i) in neg.iter().chain(pos.iter()).enumerate() {
        folds[slot % k].push(*i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn check(scores: &[f64], labels: &[bool]) -> Result<(usize, usize), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch(scores.len(), labels.len()));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(EvalError::NanScore(i));
    }
    let pos = labels.iter().filter(|&&b| b).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::SingleClass);
    }
    Ok((pos, neg))
}

/// Mann–Whitney AUC: the probability a random positive outscores a random
/// negative, ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    let (pos, neg) = check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Midranks, doubled to stay in integers: tie group [i, j) gets i + j + 1.
    let mut rank_sum_x2: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let positives = order[i..j].iter().filter(|&&o| labels[o]).count() as u64;
        rank_sum_x2 += positives * (i + j + 1) as u64;
        i = j;
    }
    let pos64 = pos as u64;
    let u_x2 = rank_sum_x2 - pos64 * (pos64 + 1);
    Ok(u_x2 as f64 / (2.0 * pos as f64 * neg as f64))
}

/// ROC points `(fpr, tpr)` from (0,0) to (1,1), one per distinct threshold.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>, EvalError> {
    let (pos, neg) = check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        i = j;
    }
    Ok(points)
}

/// Trapezoidal area under a polyline of `(x, y)` points.
pub fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAuc {
    pub class: FeatureClass,
    pub fold_aucs: Vec<f64>,
    pub mean_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    /// Overall-model AUC per fold.
    pub fold_aucs: Vec<f64>,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub per_class: Vec<ClassAuc>,
    pub params: ForestParams,
    pub dataset_digest: String,
    pub n_bots: usize,
    pub n_humans: usize,
    /// Held-out overall scores, indexed like the input samples.
    #[serde(skip)]
    pub oof_scores: Vec<f64>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
}

/// For each fold: train a suite on the other folds, score the held-out fold
/// with all seven models and record per-fold AUCs. Folds use `seed`; forests
/// use `params.rng_seed`.
pub fn cross_validate(
    x: &[FeatureVector],
    y: &[bool],
    registry: &FeatureRegistry,
    params: &ForestParams,
    k: usize,
    seed: u64,
    dataset_digest: &str,
) -> Result<CvReport, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch(x.len(), y.len()));
    }
    let folds = stratified_kfold(y, k, seed)?;
    let mut fold_aucs = Vec::with_capacity(k);
    let mut class_aucs: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(k)).collect();
    let mut oof = vec![f64::NAN; y.len()];
    for (f, held) in folds.iter().enumerate() {
        let mut in_fold = vec![false; y.len()];
        for &i in held {
            in_fold[i] = true;
        }
        let train_idx: Vec<usize> = (0..y.len()).filter(|&i| !in_fold[i]).collect();
        let tx: Vec<FeatureVector> = train_idx.iter().map(|&i| x[i].clone()).collect();
        let ty: Vec<bool> = train_idx.iter().map(|&i| y[i]).collect();
        let suite = train_suite(&tx, &ty, params, registry, dataset_digest)?;
        let mut scores = Vec::with_capacity(held.len());
        for &i in held {
            scores.push(score_suite(&suite, &x[i])?);
        }
        let hy: Vec<bool> = held.iter().map(|&i| y[i]).collect();
        let overall: Vec<f64> = scores.iter().map(|s| s.overall).collect();
        for (&i, &s) in held.iter().zip(&overall) {
            oof[i] = s;
        }
        fold_aucs.push(roc_auc(&overall, &hy)?);
        for class in FeatureClass::ALL {
            let cs: Vec<f64> = scores.iter().map(|s| s.class(class)).collect();
            class_aucs[class.index()].push(roc_auc(&cs, &hy)?);
        }
        log::info!("fold {}/{k}: overall AUC {:.4}", f + 1, fold_aucs[f]);
    }
    let (mean_auc, std_auc) = mean_std(&fold_aucs);
    let per_class = FeatureClass::ALL
        .into_iter()
        .map(|c| {
            let v = class_aucs[c.index()].clone();
            ClassAuc {
                class: c,
                mean_auc: mean_std(&v).0,
                fold_aucs: v,
            }
        })
        .collect();
    let n_bots = y.iter().filter(|&&b| b).count();
    Ok(CvReport {
        k,
        seed,
        fold_aucs,
        mean_auc,
        std_auc,
        per_class,
        params: params.clone(),
        dataset_digest: dataset_digest.to_string(),
        n_bots,
        n_humans: y.len() - n_bots,
        oof_scores: oof,
    })
}
