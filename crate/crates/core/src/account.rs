//! Account snapshots: the unit of scoring.
//!
//! The wire format is JSON with top-level keys `user`, `tweets`, `mentions`,
//! `contacts` and `captured_at`. Timestamps travel as ISO-8601 strings and are
//! normalized to UTC seconds at parse time; everything downstream works in
//! seconds. The same document is the POST body of the scoring API and one
//! line of a corpus file.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Most recent tweets kept per account.
pub const MAX_TWEETS: usize = 200;
/// Most recent mentions kept per account.
pub const MAX_MENTIONS: usize = 100;

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("malformed snapshot document: {0}")]
    Parse(String),
    #[error("schema violation at `{field}`: {reason}")]
    Schema { field: String, reason: String },
}

impl SnapshotError {
    fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SnapshotError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserMeta {
    pub user_id: String,
    pub screen_name: String,
    #[serde(default)]
    pub display_name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub language: String,
    #[serde(default)]
    pub location: String,
    #[serde(default)]
    pub url_present: bool,
    #[serde(with = "iso_time")]
    pub created_at: Timestamp,
    pub followers_count: u64,
    pub friends_count: u64,
    pub statuses_count: u64,
    #[serde(default)]
    pub listed_count: u64,
    #[serde(default)]
    pub favourites_count: u64,
    #[serde(default)]
    pub verified: bool,
    #[serde(default)]
    pub default_profile: bool,
}

/// Profile counters of some other account seen around the scored one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactMeta {
    pub user_id: String,
    pub followers_count: u64,
    pub friends_count: u64,
    pub statuses_count: u64,
    #[serde(with = "iso_time")]
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MentionedUser {
    pub user_id: String,
    pub screen_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub tweet_id: String,
    pub author_id: String,
    #[serde(with = "iso_time")]
    pub created_at: Timestamp,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub mentioned_users: Vec<MentionedUser>,
    #[serde(default)]
    pub url_count: u64,
    #[serde(default)]
    pub is_retweet: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_author: Option<ContactMeta>,
    #[serde(default)]
    pub is_reply: bool,
    #[serde(default)]
    pub retweet_count: u64,
    #[serde(default)]
    pub favorite_count: u64,
    #[serde(default)]
    pub source_client: String,
    /// Author profile counters, when the producer embedded them (mention tweets).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<ContactMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountSnapshot {
    pub user: UserMeta,
    /// Newest first.
    #[serde(default)]
    pub tweets: Vec<Tweet>,
    /// Newest first; authored by others.
    #[serde(default)]
    pub mentions: Vec<Tweet>,
    #[serde(default)]
    pub contacts: Vec<ContactMeta>,
    #[serde(with = "iso_time")]
    pub captured_at: Timestamp,
}

/// Non-fatal observations made while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    TweetsTruncated { received: usize, kept: usize },
    MentionsTruncated { received: usize, kept: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::TweetsTruncated { received, kept } => {
                write!(f, "received {received} tweets, kept newest {kept}")
            }
            ParseWarning::MentionsTruncated { received, kept } => {
                write!(f, "received {received} mentions, kept newest {kept}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedSnapshot {
    pub snapshot: AccountSnapshot,
    pub warnings: Vec<ParseWarning>,
}

/// Parse and validate a snapshot document.
pub fn parse_snapshot(document: &str) -> Result<ParsedSnapshot, SnapshotError> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| SnapshotError::Parse(e.to_string()))?;
    snapshot_from_value(value)
}

pub fn snapshot_from_value(value: Value) -> Result<ParsedSnapshot, SnapshotError> {
    check_counts(&value)?;
    let raw: AccountSnapshot = serde_json::from_value(value)
        .map_err(|e| SnapshotError::schema(schema_field(&e), e.to_string()))?;
    AccountSnapshot::validate(raw)
}

impl AccountSnapshot {
    /// Normalize and check invariants, truncating over-cap activity lists.
    pub fn validate(mut raw: AccountSnapshot) -> Result<ParsedSnapshot, SnapshotError> {
        let mut warnings = Vec::new();
        if raw.user.screen_name.trim().is_empty() {
            return Err(SnapshotError::schema("user.screen_name", "must be nonempty"));
        }
        if raw.user.user_id.is_empty() {
            return Err(SnapshotError::schema("user.user_id", "must be nonempty"));
        }
        if raw.user.created_at > raw.captured_at {
            return Err(SnapshotError::schema(
                "user.created_at",
                "account created after capture time",
            ));
        }
        raw.user.language = raw.user.language.to_lowercase();

        for (list, name) in [(&mut raw.tweets, "tweets"), (&mut raw.mentions, "mentions")] {
            for (i, t) in list.iter_mut().enumerate() {
                normalize_tweet(t, &format!("{name}[{i}]"))?;
            }
            // Stable sort keeps producer order among same-second tweets.
            list.sort_by_key(|t| std::cmp::Reverse(t.created_at));
        }
        for (i, m) in raw.mentions.iter().enumerate() {
            if m.author_id == raw.user.user_id {
                return Err(SnapshotError::schema(
                    format!("mentions[{i}].author_id"),
                    "mention authored by the account itself",
                ));
            }
        }
        if raw.tweets.len() > MAX_TWEETS {
            let w = ParseWarning::TweetsTruncated {
                received: raw.tweets.len(),
                kept: MAX_TWEETS,
            };
            log::warn!("{}: {w}", raw.user.screen_name);
            warnings.push(w);
            raw.tweets.truncate(MAX_TWEETS);
        }
        if raw.mentions.len() > MAX_MENTIONS {
            let w = ParseWarning::MentionsTruncated {
                received: raw.mentions.len(),
                kept: MAX_MENTIONS,
            };
            log::warn!("{}: {w}", raw.user.screen_name);
            warnings.push(w);
            raw.mentions.truncate(MAX_MENTIONS);
        }
        Ok(ParsedSnapshot {
            snapshot: raw,
            warnings,
        })
    }

    /// A valid snapshot with zeroed profile counters and no activity.
    pub fn blank() -> Self {
        AccountSnapshot {
            user: UserMeta {
                user_id: "0".into(),
                screen_name: "blank".into(),
                display_name: String::new(),
                description: String::new(),
                language: String::new(),
                location: String::new(),
                url_present: false,
                created_at: 0,
                followers_count: 0,
                friends_count: 0,
                statuses_count: 0,
                listed_count: 0,
                favourites_count: 0,
                verified: false,
                default_profile: false,
            },
            tweets: Vec::new(),
            mentions: Vec::new(),
            contacts: Vec::new(),
            captured_at: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialization is infallible")
    }
}

fn normalize_tweet(t: &mut Tweet, path: &str) -> Result<(), SnapshotError> {
    if t.is_retweet != t.retweeted_author.is_some() {
        return Err(SnapshotError::schema(
            format!("{path}.retweeted_author"),
            "must be present exactly when is_retweet is true",
        ));
    }
    let mut seen = HashSet::new();
    let mut tags = Vec::with_capacity(t.hashtags.len());
    for tag in t.hashtags.drain(..) {
        let tag = tag.trim_start_matches('#').to_lowercase();
        if !tag.is_empty() && seen.insert(tag.clone()) {
            tags.push(tag);
        }
    }
    t.hashtags = tags;
    Ok(())
}

const USER_COUNTS: &[&str] = &[
    "followers_count",
    "friends_count",
    "statuses_count",
    "listed_count",
    "favourites_count",
];
const TWEET_COUNTS: &[&str] = &["url_count", "retweet_count", "favorite_count"];
const CONTACT_COUNTS: &[&str] = &["followers_count", "friends_count", "statuses_count"];

/// Reports negative counters by path before typed deserialization, which
/// would otherwise produce a less useful message.
fn check_counts(doc: &Value) -> Result<(), SnapshotError> {
    fn check(obj: &Value, fields: &[&str], path: &str) -> Result<(), SnapshotError> {
        for f in fields {
            if let Some(n) = obj.get(*f).and_then(Value::as_i64) {
                if n < 0 {
                    return Err(SnapshotError::schema(
                        format!("{path}.{f}"),
                        format!("count must be nonnegative, got {n}"),
                    ));
                }
            }
        }
        Ok(())
    }
    if !doc.is_object() {
        return Err(SnapshotError::schema("$", "document must be a JSON object"));
    }
    if let Some(user) = doc.get("user") {
        check(user, USER_COUNTS, "user")?;
    }
    for list in ["tweets", "mentions"] {
        if let Some(items) = doc.get(list).and_then(Value::as_array) {
            for (i, t) in items.iter().enumerate() {
                let path = format!("{list}[{i}]");
                check(t, TWEET_COUNTS, &path)?;
                for nested in ["retweeted_author", "author"] {
                    if let Some(c) = t.get(nested) {
                        check(c, CONTACT_COUNTS, &format!("{path}.{nested}"))?;
                    }
                }
            }
        }
    }
    if let Some(items) = doc.get("contacts").and_then(Value::as_array) {
        for (i, c) in items.iter().enumerate() {
            check(c, CONTACT_COUNTS, &format!("contacts[{i}]"))?;
        }
    }
    Ok(())
}

fn schema_field(e: &serde_json::Error) -> String {
    // serde_json reports "missing field `x`" / "unknown variant" without a path.
    let msg = e.to_string();
    msg.split('`').nth(1).unwrap_or("$").to_string()
}

/// Union of embedded contacts, retweeted authors and embedded mention
/// authors, one entry per user id. When an id is seen more than once the
/// most recently observed metadata wins; embedded contacts count as observed
/// at capture time, tweet-borne metadata at the tweet's timestamp.
pub fn derive_contacts(snapshot: &AccountSnapshot) -> Vec<ContactMeta> {
    fn offer<'a>(
        best: &mut HashMap<&'a str, (Timestamp, &'a ContactMeta)>,
        ego: &str,
        observed: Timestamp,
        c: &'a ContactMeta,
    ) {
        if c.user_id == ego {
            return;
        }
        match best.get(c.user_id.as_str()) {
            Some((t, _)) if *t >= observed => {}
            _ => {
                best.insert(c.user_id.as_str(), (observed, c));
            }
        }
    }
    let ego = snapshot.user.user_id.as_str();
    let mut best = HashMap::new();
    for c in &snapshot.contacts {
        offer(&mut best, ego, snapshot.captured_at, c);
    }
    for t in &snapshot.tweets {
        if let Some(a) = &t.retweeted_author {
            offer(&mut best, ego, t.created_at, a);
        }
    }
    for m in &snapshot.mentions {
        if let Some(a) = &m.author {
            offer(&mut best, ego, m.created_at, a);
        }
    }
    let mut out: Vec<ContactMeta> = best.into_values().map(|(_, c)| c.clone()).collect();
    out.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    out
}

pub mod iso_time {
    use chrono::{DateTime, SecondsFormat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &i64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(*ts))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        let raw = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&raw)
            .map(|t| t.timestamp())
            .map_err(|e| de::Error::custom(format!("invalid timestamp `{raw}`: {e}")))
    }

    pub fn format(ts: i64) -> String {
        DateTime::from_timestamp(ts, 0)
            .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
            .unwrap_or_else(|| ts.to_string())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn minimal_doc() -> String {
        r#"{
            "user": {
                "user_id": "1", "screen_name": "alice", "created_at": "2015-01-01T00:00:00Z",
                "followers_count": 10, "friends_count": 5, "statuses_count": 100
            },
            "tweets": [], "mentions": [], "contacts": [],
            "captured_at": "2016-01-01T00:00:00Z"
        }"#
        .to_string()
    }

    #[test]
    fn minimal_document_parses_with_empty_lists() {
        let parsed = parse_snapshot(&minimal_doc()).unwrap();
        assert!(parsed.warnings.is_empty());
        let s = parsed.snapshot;
        assert!(s.tweets.is_empty() && s.mentions.is_empty() && s.contacts.is_empty());
        assert_eq!(s.captured_at, 1_451_606_400);
    }

    #[test]
    fn negative_count_is_schema_error_naming_field() {
        let doc = minimal_doc().replace("\"followers_count\": 10", "\"followers_count\": -1");
        match parse_snapshot(&doc) {
            Err(SnapshotError::Schema { field, .. }) => assert_eq!(field, "user.followers_count"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn empty_screen_name_rejected() {
        let doc = minimal_doc().replace("\"alice\"", "\"\"");
        assert!(matches!(
            parse_snapshot(&doc),
            Err(SnapshotError::Schema { .. })
        ));
    }

    #[test]
    fn missing_required_field_is_schema_error() {
        let doc = minimal_doc().replace("\"statuses_count\": 100", "\"other\": 1");
        match parse_snapshot(&doc) {
            Err(SnapshotError::Schema { field, .. }) => assert_eq!(field, "statuses_count"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            parse_snapshot("{\"user\": "),
            Err(SnapshotError::Parse(_))
        ));
    }

    fn tweet_json(i: usize) -> String {
        format!(
            r##"{{"tweet_id": "t{i}", "author_id": "1", "created_at": "{}", "text": "hello", "hashtags": ["A", "a", "#b"]}}"##,
            iso_time::format(1_400_000_000 + i as i64 * 60)
        )
    }

    #[test]
    fn over_cap_tweets_truncated_to_newest() {
        let tweets: Vec<String> = (0..250).map(tweet_json).collect();
        let doc = minimal_doc().replace("\"tweets\": []", &format!("\"tweets\": [{}]", tweets.join(",")));
        let parsed = parse_snapshot(&doc).unwrap();
        assert_eq!(parsed.snapshot.tweets.len(), 200);
        assert_eq!(parsed.snapshot.tweets[0].tweet_id, "t249");
        assert_eq!(parsed.snapshot.tweets[199].tweet_id, "t50");
        assert_eq!(
            parsed.warnings,
            vec![ParseWarning::TweetsTruncated { received: 250, kept: 200 }]
        );
        assert_eq!(parsed.snapshot.tweets[0].hashtags, vec!["a", "b"]);
    }

    #[test]
    fn retweet_flag_must_match_author() {
        let doc = minimal_doc().replace(
            "\"tweets\": []",
            r#""tweets": [{"tweet_id": "x", "author_id": "1", "created_at": "2015-06-01T00:00:00Z", "is_retweet": true}]"#,
        );
        assert!(matches!(parse_snapshot(&doc), Err(SnapshotError::Schema { .. })));
    }

    #[test]
    fn self_authored_mention_rejected() {
        let doc = minimal_doc().replace(
            "\"mentions\": []",
            r#""mentions": [{"tweet_id": "m", "author_id": "1", "created_at": "2015-06-01T00:00:00Z"}]"#,
        );
        assert!(matches!(parse_snapshot(&doc), Err(SnapshotError::Schema { .. })));
    }

    #[test]
    fn offset_timestamps_normalize_to_utc() {
        let doc = minimal_doc().replace("2016-01-01T00:00:00Z", "2016-01-01T02:00:00+02:00");
        assert_eq!(parse_snapshot(&doc).unwrap().snapshot.captured_at, 1_451_606_400);
    }

    fn contact(id: &str, followers: u64, created: i64) -> ContactMeta {
        ContactMeta {
            user_id: id.into(),
            followers_count: followers,
            friends_count: 1,
            statuses_count: 1,
            created_at: created,
        }
    }

    #[test]
    fn no_sources_no_contacts() {
        let s = parse_snapshot(&minimal_doc()).unwrap().snapshot;
        assert!(derive_contacts(&s).is_empty());
    }

    #[test]
    fn repeated_retweets_dedup_to_latest_metadata() {
        let mut s = parse_snapshot(&minimal_doc()).unwrap().snapshot;
        for (i, f) in [5u64, 7, 9].into_iter().enumerate() {
            s.tweets.push(Tweet {
                tweet_id: format!("r{i}"),
                author_id: "1".into(),
                created_at: 1_420_000_000 + i as i64,
                text: String::new(),
                hashtags: vec![],
                mentioned_users: vec![],
                url_count: 0,
                is_retweet: true,
                retweeted_author: Some(contact("42", f, 0)),
                is_reply: false,
                retweet_count: 0,
                favorite_count: 0,
                source_client: String::new(),
                author: None,
            });
        }
        let contacts = derive_contacts(&s);
        assert_eq!(contacts.len(), 1);
        assert_eq!(contacts[0].followers_count, 9);
    }
}
