//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p botscope --test acceptance -- --nocapture` to see
//! the report; the test fails if any criterion fails.

// `ensure!(x >= t)` must fail on NaN, which the negated form does.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Child, Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use botscope::evaluation::{roc_auc, roc_curve, trapezoid_area};
use botscope::features::{global_clustering, named_values};
use botscope::forest::{gini_impurity, score_suite, train_forest};
use botscope::ingest::FixtureSource;
use botscope::service::{router, AppState, ManualClock, RateLimiter, ScoreReport, Scorer};
use botscope::stats::describe;
use botscope::store::{ScoreStore, ScoreStoreEntry};
use botscope::{extract_all, AccountSnapshot, FeatureClass, FeatureRegistry, FeatureVector, ForestParams, Scores, SentimentLexicons};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_botscope")
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(bin())
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    ensure!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?} output: {e}"))
}

fn benchmark() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let corpus = corpus.to_str().unwrap();
    let start = Instant::now();
    run_cli(&["synth", "--seed", "42", "--bots", "500", "--humans", "500", "--out", corpus])?;
    let cv = run_cli(&["crossval", "--corpus", corpus, "--k", "10"])?;
    let secs = start.elapsed().as_secs_f64();
    let mean = cv["mean_auc"].as_f64().ok_or("no mean_auc")?;
    let per_class: Vec<(String, f64)> = cv["per_class"]
        .as_array()
        .ok_or("no per_class")?
        .iter()
        .map(|c| (c["class"].as_str().unwrap_or("?").to_string(), c["mean_auc"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    ensure!(mean >= 0.95, "mean overall AUC {mean:.4} < 0.95");
    ensure!(per_class.len() == 6, "expected 6 class AUCs, got {}", per_class.len());
    for (c, a) in &per_class {
        ensure!(*a > 0.5, "{c} AUC {a:.4} not above 0.5");
    }
    ensure!(secs < 300.0, "took {secs:.1} s");
    let classes: Vec<String> = per_class.iter().map(|(c, a)| format!("{c} {a:.3}")).collect();
    Ok(format!("overall AUC {mean:.4}; {}; {secs:.1} s", classes.join(", ")))
}

fn seven_scores() -> Outcome {
    let t = train_small(40, 40, 7);
    let lex = SentimentLexicons::builtin();
    let mut checked = 0;
    for snap in [AccountSnapshot::blank(), fixture("alice.json"), fixture("acct_mixed.json")] {
        let x = extract_all(&snap, &t.registry, &lex).map_err(|e| e.to_string())?;
        let s = score_suite(&t.suite, &x).map_err(|e| e.to_string())?;
        let arr = s.as_array();
        ensure!(arr.len() == 7 && s.all_in_unit_interval(), "{}: scores {arr:?}", snap.user.screen_name);
        checked += 1;
    }
    Ok(format!("{checked} snapshots (one with no activity) each scored 7 values in [0,1]"))
}

fn auc_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let (s, y) = random_auc_instance(&mut rng);
        let auc = roc_auc(&s, &y).map_err(|e| e.to_string())?;
        let brute = brute_auc(&s, &y);
        let area = trapezoid_area(&roc_curve(&s, &y).map_err(|e| e.to_string())?);
        worst = worst.max((auc - brute).abs()).max((area - auc).abs());
        ensure!((auc - brute).abs() <= 1e-12, "instance {i}: rank {auc} vs brute {brute}");
        ensure!((area - auc).abs() <= 1e-12, "instance {i}: trapezoid {area} vs rank {auc}");
    }
    Ok(format!("500 instances, max deviation {worst:.1e}"))
}

fn graph_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..200 {
        let (g, adj) = random_graph(&mut rng, i % 2 == 1);
        ensure!(
            global_clustering(&g) == brute_clustering(&adj),
            "graph {i}: clustering {} vs brute {}",
            global_clustering(&g),
            brute_clustering(&adj)
        );
        let deg: Vec<usize> = g.degree_and_strength().iter().map(|(d, _)| *d).collect();
        let want = brute_degrees(&adj);
        ensure!(deg == want, "graph {i}: degrees {deg:?} vs {want:?}");
        let st = describe(&deg.iter().map(|&d| d as f64).collect::<Vec<_>>());
        if !want.is_empty() {
            let mut sorted = want.clone();
            sorted.sort_unstable();
            let n = sorted.len();
            let median = if n % 2 == 1 {
                sorted[n / 2] as f64
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
            };
            let mean = want.iter().sum::<usize>() as f64 / n as f64;
            ensure!(
                st.count == n
                    && st.min == sorted[0] as f64
                    && st.max == sorted[n - 1] as f64
                    && st.median == median
                    && st.mean == mean,
                "graph {i}: degree stats {st:?}"
            );
        }
    }
    let mut k4 = botscope::features::InteractionGraph::new(botscope::features::GraphKind::HashtagCooccurrence, None);
    for (a, b) in [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")] {
        k4.add_edge(a, b);
    }
    let c = global_clustering(&k4);
    ensure!(c == 0.75, "K4 minus an edge gave {c}");
    Ok("200 random graphs exact; K4 minus an edge = 0.75".into())
}

fn cart_and_forest() -> Outcome {
    ensure!(gini_impurity(5, 5).ok() == Some(0.5), "gini(5,5)");
    ensure!(gini_impurity(10, 0).ok() == Some(0.0), "gini(10,0)");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = 8;
    let x: Vec<FeatureVector> = (0..300)
        .map(|_| FeatureVector {
            registry_version: "reg-test".into(),
            values: (0..d).map(|_| f64::from(rng.random_range(0..50u32))).collect(),
        })
        .collect();
    let y: Vec<bool> = (0..x.len()).map(|_| rng.random_bool(0.5)).collect();
    let mut seen = std::collections::HashMap::new();
    let (x, y): (Vec<_>, Vec<_>) = x
        .into_iter()
        .zip(y)
        .filter(|(v, _)| seen.insert(v.values.iter().map(|f| f.to_bits()).collect::<Vec<_>>(), ()).is_none())
        .unzip();
    let single = ForestParams {
        n_trees: 1,
        max_features: Some(d),
        bootstrap: false,
        ..ForestParams::default()
    };
    let tree = train_forest(&x, &y, &single).map_err(|e| e.to_string())?;
    for (v, &label) in x.iter().zip(&y) {
        let p = tree.predict_score(v).map_err(|e| e.to_string())?;
        ensure!(p == if label { 1.0 } else { 0.0 }, "tree failed to memorize a row: {p} for {label}");
    }

    let params = ForestParams {
        n_trees: 25,
        ..ForestParams::default()
    }
    .with_seed(11);
    let a = botscope::forest::encode_forest(&train_forest(&x, &y, &params).map_err(|e| e.to_string())?);
    let b = botscope::forest::encode_forest(&train_forest(&x, &y, &params).map_err(|e| e.to_string())?);
    ensure!(a == b, "same seed gave different model bytes");
    let t1 = train_small(20, 20, 9).suite.encode();
    let t2 = train_small(20, 20, 9).suite.encode();
    ensure!(t1 == t2, "same seed gave different suite bytes");
    Ok(format!("gini ok; {} rows memorized; forest and suite bytes identical", x.len()))
}

fn service_state(clock: Arc<ManualClock>, store: ScoreStore, limit: u32) -> AppState {
    let t = train_small(30, 30, 13);
    let scorer = Scorer::new(t.suite, SentimentLexicons::builtin()).unwrap();
    AppState::new(scorer, Arc::new(FixtureSource::new(fixture_dir())), store, RateLimiter::new(limit, 900))
        .with_clock(clock)
}

fn get(uri: &str, key: &str) -> Request<Body> {
    Request::builder().uri(uri).header("x-api-key", key).body(Body::empty()).unwrap()
}

fn rate_limiter() -> Outcome {
    let t0 = 1_700_000_000;
    let clock = Arc::new(ManualClock::new(t0));
    let state = service_state(clock.clone(), ScoreStore::in_memory(), 180);
    let app = router(state);
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
    rt.block_on(async {
        let mut tasks = tokio::task::JoinSet::new();
        for _ in 0..1000 {
            let app = app.clone();
            tasks.spawn(async move { app.oneshot(get("/api/v1/score/alice", "k1")).await.unwrap() });
        }
        let (mut ok, mut limited, mut other) = (0, 0, 0);
        while let Some(r) = tasks.join_next().await {
            match r.unwrap().status() {
                StatusCode::OK => ok += 1,
                StatusCode::TOO_MANY_REQUESTS => limited += 1,
                _ => other += 1,
            }
        }
        ensure!(ok == 180 && limited == 820 && other == 0, "ok {ok}, limited {limited}, other {other}");

        clock.advance(100);
        let r = app.clone().oneshot(get("/api/v1/score/alice", "k1")).await.unwrap();
        ensure!(r.status() == StatusCode::TOO_MANY_REQUESTS, "expected 429, got {}", r.status());
        let header = |name: &str| r.headers().get(name).and_then(|v| v.to_str().ok()).map(str::to_string);
        ensure!(header("retry-after").as_deref() == Some("800"), "Retry-After {:?}", header("retry-after"));
        ensure!(
            header("x-ratelimit-reset") == Some((t0 + 900).to_string()),
            "reset {:?}",
            header("x-ratelimit-reset")
        );

        let r = app.clone().oneshot(get("/api/v1/score/alice", "k2")).await.unwrap();
        ensure!(r.status() == StatusCode::OK, "fresh key got {}", r.status());
        ensure!(
            r.headers().get("x-ratelimit-remaining").unwrap() == "179",
            "fresh key remaining {:?}",
            r.headers().get("x-ratelimit-remaining")
        );

        clock.advance(800);
        let r = app.clone().oneshot(get("/api/v1/score/alice", "k1")).await.unwrap();
        ensure!(r.status() == StatusCode::OK, "after the window expired got {}", r.status());
        Ok("1000 concurrent -> 180 admitted, 820 refused; Retry-After 800; keys independent".to_string())
    })
}

/// Splits a raw score log into record payloads without the crate's decoder.
fn raw_payloads(bytes: &[u8]) -> Result<Vec<Value>, String> {
    ensure!(bytes.len() >= 12 && &bytes[..8] == b"BSSCORES", "bad header");
    let mut at = 12;
    let mut out = Vec::new();
    while at < bytes.len() {
        let len = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        let payload = &bytes[at + 8..at + 8 + len];
        out.push(serde_json::from_slice(payload).map_err(|e| e.to_string())?);
        at += 8 + len;
    }
    Ok(out)
}

fn privacy() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scores.log");
    let state = service_state(
        Arc::new(ManualClock::new(1_700_000_000)),
        ScoreStore::open(&path).map_err(|e| e.to_string())?,
        180,
    );
    let app = router(state);
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        let r = app.clone().oneshot(get("/api/v1/score/alice", "k")).await.unwrap();
        assert_eq!(r.status(), StatusCode::OK);
        let doc = std::fs::read_to_string(fixture_dir().join("acct_mixed.json")).unwrap();
        let post = Request::post("/api/v1/score").header("x-api-key", "k").body(Body::from(doc)).unwrap();
        let r = app.clone().oneshot(post).await.unwrap();
        assert_eq!(r.status(), StatusCode::OK);
    });
    drop(app);
    let bytes = std::fs::read(&path).unwrap();
    let records = raw_payloads(&bytes)?;
    ensure!(records.len() == 2, "{} records", records.len());
    for r in &records {
        let mut keys: Vec<&str> = r.as_object().ok_or("record is not an object")?.keys().map(String::as_str).collect();
        keys.sort_unstable();
        ensure!(keys == ["account", "model_version", "recorded_at", "scores"], "record keys {keys:?}");
        let mut sk: Vec<&str> = r["scores"].as_object().ok_or("scores")?.keys().map(String::as_str).collect();
        sk.sort_unstable();
        let mut want = Scores::NAMES.to_vec();
        want.sort_unstable();
        ensure!(sk == want, "score keys {sk:?}");
        ensure!(r["model_version"].as_str().is_some_and(|v| v.starts_with("model-")), "model digest");
        ensure!(r["recorded_at"].is_i64(), "timestamp");
    }
    let text = String::from_utf8_lossy(&bytes);
    for leaked in ["lovely evening", "Bloomington", "1001", "libraryfan", "Coffee, code", "newsbot", "\"700\""] {
        ensure!(!text.contains(leaked), "log contains `{leaked}`");
    }
    Ok("2 records, fields {account, scores, model_version, recorded_at} only; no activity or profile data".into())
}

fn cdf() -> Outcome {
    let mut store = ScoreStore::in_memory();
    for (i, s) in [0.2, 0.4, 0.4, 0.9].into_iter().enumerate() {
        store
            .record(ScoreStoreEntry::new(&format!("acct{i}"), Scores::from_array([s; 7]), "model-x", 1))
            .map_err(|e| e.to_string())?;
    }
    let at = store.cdf_at(0.4).map_err(|e| e.to_string())?;
    ensure!(at == 0.75, "CDF(0.4) = {at}");
    for seed in [1u64, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bulk = ScoreStore::in_memory();
        for i in 0..5000 {
            let s: f64 = rng.random();
            let name = format!("u{}", rng.random_range(0..3000));
            bulk.record(ScoreStoreEntry::new(&name, Scores::from_array([s; 7]), "model-x", i))
                .map_err(|e| e.to_string())?;
        }
        let pts = bulk.score_cdf(100).map_err(|e| e.to_string())?;
        ensure!(pts.windows(2).all(|w| w[0].fraction <= w[1].fraction), "seed {seed}: not monotone");
        ensure!(pts.last().map(|p| p.fraction) == Some(1.0), "seed {seed}: does not end at 1");
    }
    Ok("CDF(0.4) = 0.75; 3 seeded bulk loads monotone ending at 1.0".into())
}

fn registry() -> Outcome {
    let reg = FeatureRegistry::standard();
    let mut names: Vec<&str> = reg.specs().iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    ensure!(names.len() == reg.len() && reg.len() >= 200, "{} unique of {}", names.len(), reg.len());
    let mut per_class = Vec::new();
    for c in FeatureClass::ALL {
        let n = reg.class_indices(c).len();
        ensure!(n >= 10, "{c:?} has {n}");
        per_class.push(n);
    }
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture_dir().join("acct_mixed.golden.json")).unwrap()).unwrap();
    let x = extract_all(&fixture("acct_mixed.json"), &reg, &SentimentLexicons::builtin()).map_err(|e| e.to_string())?;
    for (spec, v) in named_values(&reg, &x) {
        let want = &golden["features"][&spec.name];
        let same = match want.as_f64() {
            Some(w) => w.to_bits() == v.to_bits(),
            None => want.is_null() && v.is_nan(),
        };
        ensure!(same, "{}: {v} vs golden {want}", spec.name);
    }
    Ok(format!("{} unique features, per class {per_class:?}; golden vector reproduced", reg.len()))
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (corpus, model, store) = (p("corpus"), p("model.bin"), p("scores.log"));
    run_cli(&["synth", "--seed", "42", "--bots", "60", "--humans", "60", "--out", &corpus])?;
    run_cli(&["train", "--corpus", &corpus, "--model", &model, "--trees", "30"])?;
    let fixtures = fixture_dir();
    let mut server = Server(
        Command::new(bin())
            .args(["serve", "--listen", "127.0.0.1:0", "--model", &model, "--store", &store, "--fixtures"])
            .arg(&fixtures)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?,
    );
    let mut line = String::new();
    BufReader::new(server.0.stdout.take().unwrap())
        .read_line(&mut line)
        .map_err(|e| e.to_string())?;
    let base = line
        .trim()
        .strip_prefix("listening on ")
        .ok_or_else(|| format!("unexpected first line `{}`", line.trim()))?
        .to_string();
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(30)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent
        .get(format!("{base}/api/v1/score/alice?detail=1"))
        .header("Origin", "http://example.org")
        .call()
        .map_err(|e| e.to_string())?;
    ensure!(resp.status() == 200, "status {}", resp.status());
    ensure!(
        resp.headers().get("access-control-allow-origin").is_some(),
        "no CORS header on the score response"
    );
    let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
    let report: ScoreReport = serde_json::from_str(&body).map_err(|e| format!("{e}: {body}"))?;
    ensure!(report.screen_name == "alice", "screen_name {}", report.screen_name);
    ensure!(report.scores.all_in_unit_interval(), "scores {:?}", report.scores);
    ensure!(report.meta.tweets_used == 5 && report.meta.mentions_used == 1, "meta {:?}", report.meta);
    ensure!(report.meta.model_version.starts_with("model-"), "model_version {}", report.meta.model_version);
    let detail = report.meta.detail.as_ref().ok_or("detail=1 gave no detail")?;
    ensure!(detail.tweet_times.len() == 5, "detail {detail:?}");
    Ok(format!("200 from {base}, overall {:.3}", report.scores.overall))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 benchmark AUC and runtime", benchmark),
        ("2 seven scores in [0,1]", seven_scores),
        ("3 AUC oracle", auc_oracle),
        ("4 graph oracle", graph_oracle),
        ("5 CART and forest", cart_and_forest),
        ("6 rate limiter", rate_limiter),
        ("7 datastore privacy", privacy),
        ("8 score CDF", cdf),
        ("9 feature registry", registry),
        ("10 end to end", end_to_end),
    ];
    println!();
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                println!("FAIL  {name}: {why} [{secs:.1}s]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
