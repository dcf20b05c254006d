//! Seven forests scoring one account: one over every feature and one per
//! feature class.
//!
//! Suite file layout (little-endian):
//!
//! ```text
//! "BSSUITE\0" u16:version str:meta_json u32:7 (str:name forest)*7
//! ```
//!
//! with `forest` as in the forest codec; names are `overall` followed by the
//! six class names in class order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::codec::{read_forest, write_forest, Reader, Writer};
use super::{train_forest_on, ForestError, ForestModel, ForestParams};
use crate::features::{FeatureClass, FeatureRegistry, FeatureVector};

const SUITE_MAGIC: &[u8; 8] = b"BSSUITE\0";
const SUITE_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMeta {
    pub registry_version: String,
    pub dataset_digest: String,
    pub params: ForestParams,
    pub n_bots: usize,
    pub n_humans: usize,
    /// Set by callers that want a training date recorded; left empty by
    /// [`train_suite`] so identical inputs give identical files.
    #[serde(default)]
    pub trained_at: Option<String>,
}

/// The seven bot-likelihood scores for one account.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub overall: f64,
    pub network: f64,
    pub user: f64,
    pub friends: f64,
    pub temporal: f64,
    pub content: f64,
    pub sentiment: f64,
}

impl Scores {
    pub const NAMES: [&'static str; 7] = [
        "overall", "network", "user", "friends", "temporal", "content", "sentiment",
    ];

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.overall,
            self.network,
            self.user,
            self.friends,
            self.temporal,
            self.content,
            self.sentiment,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Scores {
            overall: a[0],
            network: a[1],
            user: a[2],
            friends: a[3],
            temporal: a[4],
            content: a[5],
            sentiment: a[6],
        }
    }

    pub fn class(&self, class: FeatureClass) -> f64 {
        self.as_array()[1 + class.index()]
    }

    pub fn all_in_unit_interval(&self) -> bool {
        self.as_array().iter().all(|s| (0.0..=1.0).contains(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSuiteModel {
    pub overall: ForestModel,
    /// One model per class, in [`FeatureClass::ALL`] order.
    pub per_class: Vec<(FeatureClass, ForestModel)>,
    pub meta: SuiteMeta,
}

/// Trains the overall model on the full vector and one model per class
/// block. Class `i` (in class order) uses seed `rng_seed + i + 1`.
pub fn train_suite(
    x: &[FeatureVector],
    y: &[bool],
    params: &ForestParams,
    registry: &FeatureRegistry,
    dataset_digest: &str,
) -> Result<ScoreSuiteModel, ForestError> {
    if let Some(v) = x.iter().find(|v| v.registry_version != registry.version()) {
        return Err(ForestError::RegistryMismatch {
            expected: registry.version().to_string(),
            found: v.registry_version.clone(),
        });
    }
    let overall = train_forest_on(x, y, params, (0..registry.len()).collect())?;
    let mut per_class = Vec::with_capacity(6);
    for class in FeatureClass::ALL {
        let subset = registry.class_indices(class);
        // An explicit max_features is capped to the block width.
        let p = ForestParams {
            rng_seed: params.rng_seed.wrapping_add(class.index() as u64 + 1),
            max_features: params.max_features.map(|mf| mf.min(subset.len())),
            ..params.clone()
        };
        per_class.push((class, train_forest_on(x, y, &p, subset)?));
    }
    let n_bots = y.iter().filter(|&&b| b).count();
    Ok(ScoreSuiteModel {
        overall,
        per_class,
        meta: SuiteMeta {
            registry_version: registry.version().to_string(),
            dataset_digest: dataset_digest.to_string(),
            params: params.clone(),
            n_bots,
            n_humans: y.len() - n_bots,
            trained_at: None,
        },
    })
}

pub fn score_suite(suite: &ScoreSuiteModel, x: &FeatureVector) -> Result<Scores, ForestError> {
    let mut out = [0.0; 7];
    out[0] = suite.overall.predict_score(x)?;
    for (i, (_, m)) in suite.per_class.iter().enumerate() {
        out[i + 1] = m.predict_score(x)?;
    }
    Ok(Scores::from_array(out))
}

impl ScoreSuiteModel {
    pub fn model(&self, class: FeatureClass) -> &ForestModel {
        &self.per_class[class.index()].1
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(SUITE_MAGIC);
        w.u16(SUITE_VERSION);
        w.str(&serde_json::to_string(&self.meta).expect("suite metadata serializes"));
        w.u32(7);
        w.str("overall");
        write_forest(&mut w, &self.overall);
        for (class, m) in &self.per_class {
            w.str(class.as_str());
            write_forest(&mut w, m);
        }
        w.buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ForestError> {
        let mut r = Reader::new(bytes);
        if r.take(8, "magic")? != SUITE_MAGIC {
            return Err(ForestError::Format("not a score suite file (bad magic)".into()));
        }
        let version = r.u16("version")?;
        if version != SUITE_VERSION {
            return Err(ForestError::Format(format!("unsupported suite version {version}")));
        }
        let meta: SuiteMeta = serde_json::from_str(&r.str("metadata")?)
            .map_err(|e| ForestError::Format(format!("metadata: {e}")))?;
        if r.u32("model count")? != 7 {
            return Err(ForestError::Format("a suite holds exactly 7 models".into()));
        }
        let expect_name = |r: &mut Reader<'_>, want: &str| -> Result<(), ForestError> {
            let got = r.str("model name")?;
            if got != want {
                return Err(ForestError::Format(format!("expected model `{want}`, found `{got}`")));
            }
            Ok(())
        };
        expect_name(&mut r, "overall")?;
        let overall = read_forest(&mut r)?;
        let mut per_class = Vec::with_capacity(6);
        for class in FeatureClass::ALL {
            expect_name(&mut r, class.as_str())?;
            per_class.push((class, read_forest(&mut r)?));
        }
        if !r.done() {
            return Err(ForestError::Format("trailing bytes after suite".into()));
        }
        for m in std::iter::once(&overall).chain(per_class.iter().map(|(_, m)| m)) {
            if m.registry_version != meta.registry_version {
                return Err(ForestError::Format("models disagree on registry version".into()));
            }
        }
        Ok(ScoreSuiteModel {
            overall,
            per_class,
            meta,
        })
    }

    /// Digest of the encoded suite; identifies the model in reports.
    pub fn version(&self) -> String {
        format!("model-{}", crate::digest::short_hex(self.encode()))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.encode())
    }

    pub fn load(path: &Path) -> Result<Self, ForestError> {
        let bytes = std::fs::read(path).map_err(|source| ForestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::decode(&bytes)
    }
}
