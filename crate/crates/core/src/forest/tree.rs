//! CART decision trees with Gini impurity.

use rand::Rng;

use super::ForestError;

/// Decreases closer than this are treated as ties.
pub const MIN_DECREASE: f64 = 1e-12;

/// `1 − p₊² − p₋²` for a node holding `pos` positives and `neg` negatives.
pub fn gini_impurity(pos: usize, neg: usize) -> Result<f64, ForestError> {
    let n = pos + neg;
    if n == 0 {
        return Err(ForestError::EmptyNode);
    }
    Ok(gini_unchecked(pos, n))
}

#[inline]
fn gini_unchecked(pos: usize, n: usize) -> f64 {
    let p = pos as f64 / n as f64;
    let q = 1.0 - p;
    1.0 - p * p - q * q
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    /// Samples with `x[feature] <= threshold` go left. `feature` indexes the
    /// owning model's feature subset.
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Fraction of positive (bot) training samples in the leaf.
        fraction: f64,
        samples: usize,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { fraction, .. } => return *fraction,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent impurity minus the size-weighted child impurities.
    pub decrease: f64,
}

/// Best threshold over one feature. `pairs` is sorted in place.
fn scan_feature(pairs: &mut [(f64, bool)], min_leaf: usize) -> Option<(f64, f64)> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    let total_pos = pairs.iter().filter(|p| p.1).count();
    let parent = gini_unchecked(total_pos, n);
    let mut best: Option<(f64, f64)> = None;
    let mut left_pos = 0usize;
    for i in 0..n - 1 {
        if pairs[i].1 {
            left_pos += 1;
        }
        let left_n = i + 1;
        let right_n = n - left_n;
        if pairs[i].0 == pairs[i + 1].0 || left_n < min_leaf || right_n < min_leaf {
            continue;
        }
        let weighted = (left_n as f64 * gini_unchecked(left_pos, left_n)
            + right_n as f64 * gini_unchecked(total_pos - left_pos, right_n))
            / n as f64;
        let decrease = parent - weighted;
        if best.is_none_or(|(_, d)| decrease > d + MIN_DECREASE) {
            let (a, b) = (pairs[i].0, pairs[i + 1].0);
            let mut mid = a + (b - a) / 2.0;
            if !(mid >= a && mid < b) {
                mid = a;
            }
            best = Some((mid, decrease));
        }
    }
    best
}

fn better(candidate: Split, best: Option<Split>) -> bool {
    match best {
        None => true,
        Some(b) => {
            candidate.decrease > b.decrease + MIN_DECREASE
                || ((candidate.decrease - b.decrease).abs() <= MIN_DECREASE
                    && (candidate.feature, candidate.threshold) < (b.feature, b.threshold))
        }
    }
}

/// Exhaustive split search over `candidates` with midpoints between
/// consecutive distinct values. Ties go to the lowest feature index, then the
/// lowest threshold. An impure node takes its best split even when that
/// split does not lower impurity (XOR-like data needs such splits), so
/// `None` means the node is pure or no candidate has two distinct values.
pub fn best_split(rows: &[Vec<f64>], labels: &[bool], candidates: &[usize]) -> Option<Split> {
    let pos = labels.iter().filter(|&&y| y).count();
    if rows.len() < 2 || pos == 0 || pos == labels.len() {
        return None;
    }
    let mut best = None;
    let mut pairs = Vec::with_capacity(rows.len());
    for &f in candidates {
        pairs.clear();
        pairs.extend(rows.iter().zip(labels).map(|(r, &y)| (r[f], y)));
        if let Some((threshold, decrease)) = scan_feature(&mut pairs, 1) {
            let s = Split {
                feature: f,
                threshold,
                decrease,
            };
            if better(s, best) {
                best = Some(s);
            }
        }
    }
    best
}

pub(crate) struct GrowConfig {
    pub max_features: usize,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
}

/// Grows one tree over column-major `columns` using the samples in `indices`
/// (duplicates allowed, as produced by bootstrap resampling).
pub(crate) fn grow<R: Rng>(
    columns: &[Vec<f64>],
    labels: &[bool],
    indices: Vec<usize>,
    cfg: &GrowConfig,
    rng: &mut R,
) -> TreeNode {
    let mut order: Vec<usize> = (0..columns.len()).collect();
    let mut pairs = Vec::with_capacity(indices.len());
    grow_node(columns, labels, indices, 0, cfg, rng, &mut order, &mut pairs)
}

#[allow(clippy::too_many_arguments)]
fn grow_node<R: Rng>(
    columns: &[Vec<f64>],
    labels: &[bool],
    indices: Vec<usize>,
    depth: usize,
    cfg: &GrowConfig,
    rng: &mut R,
    order: &mut [usize],
    pairs: &mut Vec<(f64, bool)>,
) -> TreeNode {
    let n = indices.len();
    let pos = indices.iter().filter(|&&i| labels[i]).count();
    let leaf = TreeNode::Leaf {
        fraction: if n == 0 { 0.0 } else { pos as f64 / n as f64 },
        samples: n,
    };
    if pos == 0
        || pos == n
        || n < 2 * cfg.min_samples_leaf.max(1)
        || cfg.max_depth.is_some_and(|d| depth >= d)
    {
        return leaf;
    }

    // Visit features in random order until `max_features` non-constant ones
    // have been evaluated.
    let mut best: Option<Split> = None;
    let mut evaluated = 0;
    for k in 0..order.len() {
        if evaluated >= cfg.max_features {
            break;
        }
        let j = rng.random_range(k..order.len());
        order.swap(k, j);
        let f = order[k];
        let col = &columns[f];
        let first = col[indices[0]];
        if indices.iter().all(|&i| col[i] == first) {
            continue;
        }
        evaluated += 1;
        pairs.clear();
        pairs.extend(indices.iter().map(|&i| (col[i], labels[i])));
        if let Some((threshold, decrease)) = scan_feature(pairs, cfg.min_samples_leaf.max(1)) {
            let s = Split {
                feature: f,
                threshold,
                decrease,
            };
            if better(s, best) {
                best = Some(s);
            }
        }
    }
    let Some(split) = best else {
        return leaf;
    };
    let col = &columns[split.feature];
    let (left, right): (Vec<usize>, Vec<usize>) =
        indices.into_iter().partition(|&i| col[i] <= split.threshold);
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(grow_node(columns, labels, left, depth + 1, cfg, rng, order, pairs)),
        right: Box::new(grow_node(columns, labels, right, depth + 1, cfg, rng, order, pairs)),
    }
}
