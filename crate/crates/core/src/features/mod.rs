//! Account feature extraction.
//!
//! Six extractor families (network, user, friends, temporal, content,
//! sentiment) each emit a named block of values. The [`FeatureRegistry`] fixes
//! the global order of those names; a [`FeatureVector`] is positionally
//! aligned to it and carries the registry digest so a vector can never be fed
//! to a model trained against a different layout.
//!
//! Undefined values are [`MISSING`](crate::stats::MISSING); nothing is imputed
//! here.

pub mod content;
pub mod friends;
pub mod graph;
pub mod sentiment;
pub mod temporal;
pub mod text;
pub mod user;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::account::AccountSnapshot;
use crate::stats::DescriptiveStats;

pub use graph::{build_graphs, global_clustering, GraphKind, InteractionGraph};
pub use sentiment::{LexiconError, SentimentLexicons};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureClass {
    Network,
    User,
    Friends,
    Temporal,
    Content,
    Sentiment,
}

impl FeatureClass {
    pub const ALL: [FeatureClass; 6] = [
        FeatureClass::Network,
        FeatureClass::User,
        FeatureClass::Friends,
        FeatureClass::Temporal,
        FeatureClass::Content,
        FeatureClass::Sentiment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureClass::Network => "network",
            FeatureClass::User => "user",
            FeatureClass::Friends => "friends",
            FeatureClass::Temporal => "temporal",
            FeatureClass::Content => "content",
            FeatureClass::Sentiment => "sentiment",
        }
    }

    pub fn index(self) -> usize {
        FeatureClass::ALL.iter().position(|c| *c == self).unwrap()
    }
}

impl fmt::Display for FeatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown feature class `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("extractor produced unregistered feature `{0}`")]
    Unregistered(String),
    #[error("registered feature `{0}` was not produced by any extractor")]
    NotProduced(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub class: FeatureClass,
    pub extractor: String,
    pub params: String,
    pub description: String,
}

/// Output of one extractor family: named values in emission order.
#[derive(Debug, Clone)]
pub struct Block {
    class: FeatureClass,
    extractor: &'static str,
    entries: Vec<(FeatureSpec, f64)>,
}

impl Block {
    pub fn new(class: FeatureClass, extractor: &'static str) -> Self {
        Block {
            class,
            extractor,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, description: impl Into<String>, value: f64) {
        self.push_with(name, "", description, value);
    }

    pub fn push_with(
        &mut self,
        name: impl Into<String>,
        params: impl Into<String>,
        description: impl Into<String>,
        value: f64,
    ) {
        let spec = FeatureSpec {
            name: name.into(),
            class: self.class,
            extractor: self.extractor.to_string(),
            params: params.into(),
            description: description.into(),
        };
        self.entries.push((spec, value));
    }

    /// Emits `{prefix}.{field}` for every field of `stats`.
    pub fn push_stats(&mut self, prefix: &str, what: &str, params: &str, stats: &DescriptiveStats) {
        for (field, value) in DescriptiveStats::FIELDS.iter().zip(stats.values()) {
            self.push_with(format!("{prefix}.{field}"), params, format!("{field} of {what}"), value);
        }
    }

    pub fn class(&self) -> FeatureClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(s, _)| s.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(s, _)| s.name == name)
            .map(|(_, v)| *v)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FeatureSpec, f64)> {
        self.entries.iter().map(|(s, v)| (s, *v))
    }
}

/// Ordered catalog of every feature a vector carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    specs: Vec<FeatureSpec>,
    index: HashMap<String, usize>,
    version: String,
}

impl FeatureRegistry {
    /// The standard registry: every feature the six extractors emit, class
    /// blocks concatenated in [`FeatureClass::ALL`] order.
    pub fn standard() -> Self {
        let empty = crate::account::AccountSnapshot::blank();
        let blocks = run_extractors(&empty, &SentimentLexicons::default());
        let specs = blocks
            .into_iter()
            .flat_map(|b| b.entries.into_iter().map(|(s, _)| s))
            .collect();
        Self::from_specs(specs).expect("standard registry has unique names")
    }

    pub fn from_specs(specs: Vec<FeatureSpec>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(specs.len());
        let mut hasher = crate::digest::Hasher::new();
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.name.clone(), i).is_some() {
                return Err(format!("duplicate feature name `{}`", s.name));
            }
            hasher.update(format!("{}\t{}\t{}\t{}\n", s.name, s.class, s.extractor, s.params));
        }
        Ok(FeatureRegistry {
            specs,
            index,
            version: format!("reg-{}", hasher.finish_short()),
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Digest over names, classes, extractors and parameters.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.specs
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Registry positions belonging to `class`, ascending.
    pub fn class_indices(&self, class: FeatureClass) -> Vec<usize> {
        self.specs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.class == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// Human-readable manifest, one tab-separated line per feature.
    pub fn manifest(&self) -> String {
        let mut out = format!("# registry {} ({} features)\n", self.version, self.len());
        out.push_str("# index\tname\tclass\textractor\tparams\tdescription\n");
        for (i, s) in self.specs.iter().enumerate() {
            out.push_str(&format!(
                "{i}\t{}\t{}\t{}\t{}\t{}\n",
                s.name, s.class, s.extractor, s.params, s.description
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub registry_version: String,
    /// Positionally aligned to the registry; NaN marks a missing value and
    /// travels as `null` in JSON.
    #[serde(serialize_with = "ser_values", deserialize_with = "de_values")]
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Bitwise equality, treating NaN sentinels as equal.
    pub fn bit_eq(&self, other: &FeatureVector) -> bool {
        self.registry_version == other.registry_version
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()))
    }
}

fn ser_values<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let opts: Vec<Option<f64>> = values
        .iter()
        .map(|v| if v.is_finite() { Some(*v) } else { None })
        .collect();
    opts.serialize(s)
}

fn de_values<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    let opts: Vec<Option<f64>> = Vec::deserialize(d)?;
    Ok(opts
        .into_iter()
        .map(|v| v.unwrap_or(crate::stats::MISSING))
        .collect())
}

/// Runs all six extractor families, in class order.
pub fn run_extractors(snapshot: &AccountSnapshot, lexicons: &SentimentLexicons) -> Vec<Block> {
    let graphs = build_graphs(snapshot);
    let contacts = crate::account::derive_contacts(snapshot);
    vec![
        graph::network_features(&graphs),
        user::user_features(&snapshot.user, snapshot.captured_at),
        friends::friends_features(&contacts, snapshot.captured_at),
        temporal::temporal_features(&snapshot.tweets, &snapshot.mentions, snapshot.captured_at),
        content::content_features(&snapshot.tweets),
        sentiment::sentiment_features(&snapshot.tweets, lexicons),
    ]
}

/// Extracts the full feature vector in registry order.
pub fn extract_all(
    snapshot: &AccountSnapshot,
    registry: &FeatureRegistry,
    lexicons: &SentimentLexicons,
) -> Result<FeatureVector, FeatureError> {
    let mut values = vec![f64::NAN; registry.len()];
    let mut filled = vec![false; registry.len()];
    for block in run_extractors(snapshot, lexicons) {
        for (spec, v) in block.entries() {
            let pos = registry
                .position(&spec.name)
                .ok_or_else(|| FeatureError::Unregistered(spec.name.clone()))?;
            values[pos] = v;
            filled[pos] = true;
        }
    }
    if let Some(i) = filled.iter().position(|f| !f) {
        return Err(FeatureError::NotProduced(registry.specs()[i].name.clone()));
    }
    Ok(FeatureVector {
        registry_version: registry.version().to_string(),
        values,
    })
}

/// Feature values paired with their names, for dumps and reports.
pub fn named_values<'a>(
    registry: &'a FeatureRegistry,
    vector: &'a FeatureVector,
) -> impl Iterator<Item = (&'a FeatureSpec, f64)> + 'a {
    registry.specs().iter().zip(vector.values.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_floor_and_partition() {
        let reg = FeatureRegistry::standard();
        assert!(reg.len() >= 200, "only {} features", reg.len());
        let mut total = 0;
        for class in FeatureClass::ALL {
            let n = reg.class_indices(class).len();
            assert!(n >= 10, "{class} has {n} features");
            total += n;
        }
        assert_eq!(total, reg.len());
        // class blocks are contiguous and in class order
        let classes: Vec<FeatureClass> = reg.specs().iter().map(|s| s.class).collect();
        let mut sorted = classes.clone();
        sorted.sort();
        assert_eq!(classes, sorted);
    }

    #[test]
    fn registry_version_is_stable() {
        assert_eq!(FeatureRegistry::standard().version(), FeatureRegistry::standard().version());
    }

    #[test]
    fn duplicate_names_rejected() {
        let spec = FeatureSpec {
            name: "x".into(),
            class: FeatureClass::User,
            extractor: "user".into(),
            params: String::new(),
            description: String::new(),
        };
        assert!(FeatureRegistry::from_specs(vec![spec.clone(), spec]).is_err());
    }

    #[test]
    fn empty_activity_vector_is_mostly_missing() {
        let reg = FeatureRegistry::standard();
        let snap = AccountSnapshot::blank();
        let v = extract_all(&snap, &reg, &SentimentLexicons::builtin()).unwrap();
        assert_eq!(v.len(), reg.len());
        let missing = v.values.iter().filter(|x| x.is_nan()).count();
        assert!(missing * 2 > v.len(), "{missing} of {}", v.len());
    }

    #[test]
    fn vector_json_uses_null_for_missing() {
        let v = FeatureVector {
            registry_version: "r".into(),
            values: vec![1.5, f64::NAN],
        };
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"registry_version":"r","values":[1.5,null]}"#);
        let back: FeatureVector = serde_json::from_str(&json).unwrap();
        assert!(back.bit_eq(&v));
    }
}
