//! Lexicon-based sentiment features.
//!
//! Three pluggable TSV lexicons (UTF-8, `#` comment lines):
//!
//! - `happiness.tsv`: `word<TAB>score`
//! - `vad.tsv`: `word<TAB>valence<TAB>arousal<TAB>dominance`
//! - `emoticons.tsv`: `pattern<TAB>polarity`, polarity `+1` or `-1`
//!
//! Emoticon patterns match whole whitespace-delimited tokens.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::account::Tweet;
use crate::stats::{mean_present, std_present, MISSING};

use super::text::tokenize;
use super::{Block, FeatureClass};

pub const HAPPINESS_FILE: &str = "happiness.tsv";
pub const VAD_FILE: &str = "vad.tsv";
pub const EMOTICON_FILE: &str = "emoticons.tsv";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{file}:{line}: {reason}")]
    Malformed {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicons {
    pub happiness: HashMap<String, f64>,
    pub vad: HashMap<String, [f64; 3]>,
    pub emoticons: HashMap<String, i8>,
}

fn rows<'a>(
    src: &'a str,
    file: &'a str,
    columns: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>), LexiconError>> + 'a {
    src.lines().enumerate().filter_map(move |(i, line)| {
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != columns {
            return Some(Err(LexiconError::Malformed {
                file: file.to_string(),
                line: i + 1,
                reason: format!("expected {columns} tab-separated columns, found {}", cols.len()),
            }));
        }
        Some(Ok((i + 1, cols)))
    })
}

fn number(file: &str, line: usize, s: &str) -> Result<f64, LexiconError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| LexiconError::Malformed {
            file: file.to_string(),
            line,
            reason: format!("`{s}` is not a finite number"),
        })
}

impl SentimentLexicons {
    pub fn parse(happiness: &str, vad: &str, emoticons: &str) -> Result<Self, LexiconError> {
        let mut lex = SentimentLexicons::default();
        for row in rows(happiness, HAPPINESS_FILE, 2) {
            let (line, cols) = row?;
            let score = number(HAPPINESS_FILE, line, cols[1])?;
            lex.happiness.insert(cols[0].trim().to_lowercase(), score);
        }
        for row in rows(vad, VAD_FILE, 4) {
            let (line, cols) = row?;
            let v = [
                number(VAD_FILE, line, cols[1])?,
                number(VAD_FILE, line, cols[2])?,
                number(VAD_FILE, line, cols[3])?,
            ];
            lex.vad.insert(cols[0].trim().to_lowercase(), v);
        }
        for row in rows(emoticons, EMOTICON_FILE, 2) {
            let (line, cols) = row?;
            let polarity = match cols[1].trim() {
                "+1" | "1" => 1,
                "-1" => -1,
                other => {
                    return Err(LexiconError::Malformed {
                        file: EMOTICON_FILE.into(),
                        line,
                        reason: format!("polarity must be +1 or -1, got `{other}`"),
                    })
                }
            };
            lex.emoticons.insert(cols[0].trim().to_string(), polarity);
        }
        Ok(lex)
    }

    /// Loads the three lexicon files from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, LexiconError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| LexiconError::Io { path, source })
        };
        Self::parse(&read(HAPPINESS_FILE)?, &read(VAD_FILE)?, &read(EMOTICON_FILE)?)
    }

    /// The small demo lexicons shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(
            include_str!("../../data/lexicons/happiness.tsv"),
            include_str!("../../data/lexicons/vad.tsv"),
            include_str!("../../data/lexicons/emoticons.tsv"),
        )
        .expect("shipped lexicons are valid")
    }
}

/// Per-tweet scores: happiness, valence, arousal, dominance, emoticon.
#[derive(Debug, Clone, Copy)]
pub struct TweetSentiment {
    pub happiness: f64,
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
    pub emoticon: f64,
    pub emoticons_found: usize,
    pub words: usize,
    pub happiness_hits: usize,
    pub vad_hits: usize,
}

pub fn score_tweet(text: &str, lex: &SentimentLexicons) -> TweetSentiment {
    let tokens = tokenize(text);
    let happy: Vec<f64> = tokens
        .words
        .iter()
        .filter_map(|w| lex.happiness.get(w).copied())
        .collect();
    let vad: Vec<[f64; 3]> = tokens.words.iter().filter_map(|w| lex.vad.get(w).copied()).collect();
    let (mut pos, mut neg) = (0usize, 0usize);
    for t in &tokens.raw {
        match lex.emoticons.get(t.as_str()) {
            Some(1) => pos += 1,
            Some(-1) => neg += 1,
            _ => {}
        }
    }
    let vad_mean = |k: usize| {
        if vad.is_empty() {
            MISSING
        } else {
            vad.iter().map(|v| v[k]).sum::<f64>() / vad.len() as f64
        }
    };
    TweetSentiment {
        happiness: if happy.is_empty() {
            MISSING
        } else {
            happy.iter().sum::<f64>() / happy.len() as f64
        },
        valence: vad_mean(0),
        arousal: vad_mean(1),
        dominance: vad_mean(2),
        emoticon: if pos + neg == 0 {
            MISSING
        } else {
            (pos as f64 - neg as f64) / (pos + neg) as f64
        },
        emoticons_found: pos + neg,
        words: tokens.words.len(),
        happiness_hits: happy.len(),
        vad_hits: vad.len(),
    }
}

/// (name, description, per-tweet accessor).
type Series = (&'static str, &'static str, fn(&TweetSentiment) -> f64);

pub fn sentiment_features(tweets: &[Tweet], lex: &SentimentLexicons) -> Block {
    let mut b = Block::new(FeatureClass::Sentiment, "sentiment");
    let scores: Vec<TweetSentiment> = tweets.iter().map(|t| score_tweet(&t.text, lex)).collect();
    let series: [Series; 5] = [
        ("happiness", "happiness lexicon score", |s| s.happiness),
        ("valence", "VAD valence", |s| s.valence),
        ("arousal", "VAD arousal", |s| s.arousal),
        ("dominance", "VAD dominance", |s| s.dominance),
        ("emoticon", "(positive - negative)/(positive + negative) emoticons", |s| s.emoticon),
    ];
    for (name, what, get) in series {
        let per_tweet: Vec<f64> = scores.iter().map(get).collect();
        b.push_with(format!("sentiment.{name}.mean"), "lexicon", format!("mean per-tweet {what}"), mean_present(&per_tweet));
        b.push_with(format!("sentiment.{name}.std"), "lexicon", format!("std of per-tweet {what}"), std_present(&per_tweet));
    }
    let n = scores.len();
    b.push(
        "sentiment.emoticon_tweet_fraction",
        "share of tweets with at least one emoticon",
        if n == 0 {
            MISSING
        } else {
            scores.iter().filter(|s| s.emoticons_found > 0).count() as f64 / n as f64
        },
    );
    let words: usize = scores.iter().map(|s| s.words).sum();
    let coverage = |hits: usize| if words == 0 { MISSING } else { hits as f64 / words as f64 };
    b.push(
        "sentiment.happiness_coverage",
        "share of words found in the happiness lexicon",
        coverage(scores.iter().map(|s| s.happiness_hits).sum()),
    );
    b.push(
        "sentiment.vad_coverage",
        "share of words found in the VAD lexicon",
        coverage(scores.iter().map(|s| s.vad_hits).sum()),
    );
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::graph::tests::tweet;

    fn texts(ts: &[&str]) -> Vec<Tweet> {
        ts.iter()
            .map(|s| {
                let mut t = tweet("x", &[]);
                t.text = s.to_string();
                t
            })
            .collect()
    }

    #[test]
    fn positive_emoticons() {
        let b = sentiment_features(&texts(&[":) :)"]), &SentimentLexicons::builtin());
        assert_eq!(b.get("sentiment.emoticon.mean"), Some(1.0));
    }

    #[test]
    fn balanced_emoticons() {
        let b = sentiment_features(&texts(&[":) :("]), &SentimentLexicons::builtin());
        assert_eq!(b.get("sentiment.emoticon.mean"), Some(0.0));
        assert_eq!(b.get("sentiment.emoticon_tweet_fraction"), Some(1.0));
    }

    #[test]
    fn happiness_is_mean_over_matched_words() {
        let lex = SentimentLexicons::parse("good\t8\nbad\t2\n", "", "").unwrap();
        let s = score_tweet("good bad unknown", &lex);
        assert_eq!(s.happiness, 5.0);
        assert!(s.valence.is_nan());
        assert!(s.emoticon.is_nan());
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(matches!(
            SentimentLexicons::parse("good\tnope\n", "", ""),
            Err(LexiconError::Malformed { line: 1, .. })
        ));
        assert!(SentimentLexicons::parse("", "w\t1\t2\n", "").is_err());
        assert!(SentimentLexicons::parse("", "", ":)\t+2\n").is_err());
        assert!(SentimentLexicons::parse("# comment\n\ngood\t8\n", "", "").is_ok());
    }

    #[test]
    fn shipped_lexicons_load_from_disk() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lexicons");
        assert_eq!(SentimentLexicons::load_dir(&dir).unwrap(), SentimentLexicons::builtin());
    }
}
