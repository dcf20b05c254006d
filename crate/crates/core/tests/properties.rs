mod common;

use botscope::evaluation::{roc_auc, roc_curve, stratified_kfold, trapezoid_area};
use botscope::features::{global_clustering, GraphKind, InteractionGraph};
use botscope::stats::{burstiness, describe, entropy_of_counts};
use botscope::store::{ScoreStore, ScoreStoreEntry};
use botscope::Scores;
use common::brute_auc;
use proptest::prelude::*;

fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..120).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..12, n).prop_map(|v| v.into_iter().map(|s| f64::from(s) / 11.0).collect()),
            prop::collection::vec(any::<bool>(), n).prop_map(|mut y| {
                y[0] = true;
                y[1] = false;
                y
            }),
        )
    })
}

proptest! {
    #[test]
    fn auc_matches_pair_counting((s, y) in scored_labels()) {
        let auc = roc_auc(&s, &y).unwrap();
        prop_assert!((auc - brute_auc(&s, &y)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&auc));
        let area = trapezoid_area(&roc_curve(&s, &y).unwrap());
        prop_assert!((area - auc).abs() <= 1e-12);
    }

    #[test]
    fn flipping_labels_complements_auc((s, y) in scored_labels()) {
        let flipped: Vec<bool> = y.iter().map(|b| !b).collect();
        let sum = roc_auc(&s, &y).unwrap() + roc_auc(&s, &flipped).unwrap();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn auc_ignores_monotone_transforms((s, y) in scored_labels()) {
        let t: Vec<f64> = s.iter().map(|v| (3.0 * v).exp() - 7.0).collect();
        prop_assert_eq!(roc_auc(&s, &y).unwrap(), roc_auc(&t, &y).unwrap());
    }

    #[test]
    fn roc_curve_is_monotone((s, y) in scored_labels()) {
        let pts = roc_curve(&s, &y).unwrap();
        prop_assert_eq!(pts[0], (0.0, 0.0));
        prop_assert_eq!(*pts.last().unwrap(), (1.0, 1.0));
        prop_assert!(pts.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    }

    #[test]
    fn kfold_partitions_and_stratifies(pos in 10usize..60, neg in 10usize..60, k in 2usize..10, seed in any::<u64>()) {
        let y: Vec<bool> = (0..pos + neg).map(|i| i < pos).collect();
        let folds = stratified_kfold(&y, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        for f in &folds {
            let p = f.iter().filter(|&&i| y[i]).count();
            prop_assert!(p == pos / k || p == pos.div_ceil(k));
        }
    }

    #[test]
    fn clustering_is_a_fraction(edges in prop::collection::vec((0u8..15, 0u8..15), 0..80)) {
        let mut g = InteractionGraph::new(GraphKind::HashtagCooccurrence, None);
        for (a, b) in &edges {
            g.add_edge(&a.to_string(), &b.to_string());
        }
        let c = global_clustering(&g);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(g.edges.keys().all(|(a, b)| a < b));
    }

    #[test]
    fn describe_is_permutation_invariant(mut v in prop::collection::vec(-1e6f64..1e6, 1..60)) {
        let a = describe(&v);
        v.reverse();
        let b = describe(&v);
        prop_assert_eq!(a.values().map(f64::to_bits), b.values().map(f64::to_bits));
        prop_assert!(a.min <= a.median && a.median <= a.max);
        prop_assert!(a.entropy_bits >= 0.0 && a.entropy_bits <= (11f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_bounded_by_bins(counts in prop::collection::vec(0usize..50, 1..30)) {
        let h = entropy_of_counts(&counts);
        prop_assert!(h >= 0.0 && h <= (counts.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn burstiness_in_range(v in prop::collection::vec(0f64..1e5, 2..50)) {
        let b = burstiness(&v).unwrap();
        prop_assert!((-1.0..=1.0).contains(&b));
    }

    #[test]
    fn store_cdf_is_a_distribution(scores in prop::collection::vec((0u16..40, 0f64..=1.0), 1..200), bins in 1usize..50) {
        let mut store = ScoreStore::in_memory();
        for (i, (acct, s)) in scores.iter().enumerate() {
            store.record(ScoreStoreEntry::new(&format!("a{acct}"), Scores::from_array([*s; 7]), "model-x", i as i64)).unwrap();
        }
        let pts = store.score_cdf(bins).unwrap();
        prop_assert_eq!(pts.len(), bins + 1);
        prop_assert!(pts.windows(2).all(|w| w[0].fraction <= w[1].fraction && w[0].threshold < w[1].threshold));
        prop_assert_eq!(pts[bins].fraction, 1.0);
    }
}
