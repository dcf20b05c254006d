mod common;

use botscope::evaluation::{cross_validate, roc_auc};
use botscope::forest::{score_suite, train_forest};
use botscope::service::Scorer;
use botscope::{extract_all, FeatureVector, ScoreSuiteModel, SentimentLexicons};
use common::{fixture, fixture_dir, small_params, train_small};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

#[test]
fn oob_accuracy_on_synthetic_corpus() {
    let t = train_small(100, 100, 3);
    let forest = train_forest(&t.x, &t.y, &small_params(3)).unwrap();
    let oob = forest.oob_accuracy(&t.x, &t.y).unwrap();
    assert!(oob >= 0.9, "OOB accuracy {oob}");
}

#[test]
fn shuffled_labels_give_chance_auc() {
    let t = train_small(60, 60, 4);
    let mut y = t.y.clone();
    y.shuffle(&mut ChaCha8Rng::seed_from_u64(99));
    let cv = cross_validate(&t.x, &y, &t.registry, &small_params(4), 5, 4, &t.corpus.digest).unwrap();
    assert!((cv.mean_auc - 0.5).abs() <= 0.1, "shuffled-label AUC {}", cv.mean_auc);
}

#[test]
fn no_single_feature_separates_the_corpus() {
    let t = train_small(80, 80, 5);
    let mut best = (0.0, String::new());
    for (j, spec) in t.registry.specs().iter().enumerate() {
        let col: Vec<f64> = t.x.iter().map(|v| if v.values[j].is_nan() { -1.0 } else { v.values[j] }).collect();
        let auc = roc_auc(&col, &t.y).unwrap();
        let strength = auc.max(1.0 - auc);
        if strength > best.0 {
            best = (strength, spec.name.clone());
        }
    }
    assert!(best.0 < 1.0, "{} alone separates bots from humans", best.1);
}

#[test]
fn suite_file_round_trip() {
    let t = train_small(20, 20, 6);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.bin");
    t.suite.save(&path).unwrap();
    let back = ScoreSuiteModel::load(&path).unwrap();
    assert_eq!(back.encode(), t.suite.encode());
    assert_eq!(back.version(), t.suite.version());
    let x = extract_all(&fixture("alice.json"), &t.registry, &SentimentLexicons::builtin()).unwrap();
    assert_eq!(score_suite(&back, &x).unwrap(), score_suite(&t.suite, &x).unwrap());
}

#[test]
fn corrupt_model_file_is_rejected() {
    let t = train_small(20, 20, 6);
    let mut bytes = t.suite.encode();
    let mid = bytes.len() / 2;
    bytes.truncate(mid);
    assert!(ScoreSuiteModel::decode(&bytes).is_err());
    assert!(ScoreSuiteModel::decode(b"not a model").is_err());
}

#[test]
fn feature_vector_from_other_registry_is_rejected() {
    let t = train_small(20, 20, 6);
    let alien = FeatureVector {
        registry_version: "reg-other".into(),
        values: vec![0.0; t.registry.len()],
    };
    assert!(score_suite(&t.suite, &alien).is_err());
}

/// Frozen scores for the two fixtures under a model trained with fixed
/// seeds. Regenerate with `BOTSCOPE_BLESS=1` after an intended change.
#[test]
fn frozen_fixture_scores() {
    let t = train_small(60, 60, 42);
    let scorer = Scorer::new(t.suite, SentimentLexicons::builtin()).unwrap();
    let mut got = serde_json::Map::new();
    got.insert("model_version".into(), Value::from(scorer.model_version()));
    for name in ["alice.json", "acct_mixed.json"] {
        let scores = scorer.scores(&fixture(name)).unwrap();
        assert!(scores.all_in_unit_interval());
        got.insert(name.into(), serde_json::to_value(scores).unwrap());
    }
    let got = Value::Object(got);
    let path = fixture_dir().join("scores.golden.json");
    if std::env::var_os("BOTSCOPE_BLESS").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(got, want);
}
