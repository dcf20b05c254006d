//! Brute-force oracles and small builders shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use botscope::cli::corpus_features;
use botscope::features::{GraphKind, InteractionGraph};
use botscope::forest::train_suite;
use botscope::ingest::{generate_corpus, Label, LabeledCorpus, SynthParams};
use botscope::{parse_snapshot, AccountSnapshot, FeatureRegistry, FeatureVector, ForestParams, ScoreSuiteModel, SentimentLexicons};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> AccountSnapshot {
    let doc = std::fs::read_to_string(fixture_dir().join(name)).unwrap();
    parse_snapshot(&doc).unwrap().snapshot
}

/// Fraction of (positive, negative) pairs where the positive scores higher,
/// ties counting one half.
pub fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut num, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                num += 1.0;
            } else if si == sj {
                num += 0.5;
            }
        }
    }
    num / pairs
}

/// Scores drawn from a small grid so ties are common; both classes present.
pub fn random_auc_instance(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    let n = rng.random_range(2..=200);
    let levels = rng.random_range(1..=20u32);
    let mut scores: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..levels)) / f64::from(levels)).collect();
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    labels[0] = true;
    labels[1] = false;
    if rng.random_bool(0.2) {
        scores[0] = 0.999;
    }
    (scores, labels)
}

/// A random simple graph plus its adjacency matrix (undirected projection).
#[allow(clippy::needless_range_loop)]
pub fn random_graph(rng: &mut ChaCha8Rng, directed: bool) -> (InteractionGraph, Vec<Vec<bool>>) {
    let n = rng.random_range(0..=30usize);
    let p = rng.random_range(0.0..0.6);
    let kind = if directed { GraphKind::Mention } else { GraphKind::HashtagCooccurrence };
    let mut g = InteractionGraph::new(kind, None);
    let mut adj = vec![vec![false; n]; n];
    let name = |i: usize| format!("n{i:02}");
    for a in 0..n {
        for b in 0..n {
            if a == b || (!directed && b < a) {
                continue;
            }
            if rng.random_bool(p) {
                for _ in 0..rng.random_range(1..=3) {
                    g.add_edge(&name(a), &name(b));
                }
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    // Drop isolated indices: the graph only knows nodes that touch an edge.
    let keep: Vec<usize> = (0..n).filter(|&i| adj[i].iter().any(|&x| x)).collect();
    let adj = keep.iter().map(|&i| keep.iter().map(|&j| adj[i][j]).collect()).collect();
    (g, adj)
}

/// Transitivity by enumerating every center with every unordered neighbor pair.
pub fn brute_clustering(adj: &[Vec<bool>]) -> f64 {
    let n = adj.len();
    let (mut closed, mut all) = (0u64, 0u64);
    for c in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if a != c && b != c && adj[c][a] && adj[c][b] {
                    all += 1;
                    if adj[a][b] {
                        closed += 1;
                    }
                }
            }
        }
    }
    if all == 0 {
        0.0
    } else {
        closed as f64 / all as f64
    }
}

pub fn brute_degrees(adj: &[Vec<bool>]) -> Vec<usize> {
    adj.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
}

pub struct Trained {
    pub corpus: LabeledCorpus,
    pub registry: FeatureRegistry,
    pub x: Vec<FeatureVector>,
    pub y: Vec<bool>,
    pub suite: ScoreSuiteModel,
}

pub fn small_params(seed: u64) -> ForestParams {
    ForestParams {
        n_trees: 30,
        ..ForestParams::default()
    }
    .with_seed(seed)
}

/// Synthesizes a small corpus and trains a suite on it.
pub fn train_small(bots: usize, humans: usize, seed: u64) -> Trained {
    let corpus = generate_corpus(&SynthParams::new(seed, bots, humans)).unwrap();
    let registry = FeatureRegistry::standard();
    let x = corpus_features(&corpus, &registry, &SentimentLexicons::builtin()).unwrap();
    let y: Vec<bool> = corpus.accounts.iter().map(|a| a.label == Label::Bot).collect();
    let suite = train_suite(&x, &y, &small_params(seed), &registry, &corpus.digest).unwrap();
    Trained {
        corpus,
        registry,
        x,
        y,
        suite,
    }
}
