//! Timing features: posting rate, inter-tweet intervals, daily rhythm, and
//! the arrival pattern of mentions.

use chrono::{DateTime, Datelike, Timelike};

use crate::account::{Timestamp, Tweet};
use crate::stats::{burstiness, describe, entropy_of_counts, MISSING};

use super::{Block, FeatureClass};

/// Gaps between consecutive tweets (seconds), given newest-first tweets.
pub fn intervals(tweets: &[Tweet]) -> Vec<f64> {
    tweets
        .windows(2)
        .map(|w| (w[0].created_at - w[1].created_at) as f64)
        .collect()
}

/// Events per hour over the span between the oldest and newest event.
fn rate_per_hour(tweets: &[Tweet]) -> f64 {
    if tweets.len() < 2 {
        return MISSING;
    }
    let span = (tweets[0].created_at - tweets[tweets.len() - 1].created_at) as f64 / 3600.0;
    if span > 0.0 {
        tweets.len() as f64 / span
    } else {
        MISSING
    }
}

/// Tweets per UTC hour of day.
pub fn hour_histogram(tweets: &[Tweet]) -> [usize; 24] {
    let mut counts = [0usize; 24];
    for t in tweets {
        if let Some(dt) = DateTime::from_timestamp(t.created_at, 0) {
            counts[dt.hour() as usize] += 1;
        }
    }
    counts
}

fn weekday_histogram(tweets: &[Tweet]) -> [usize; 7] {
    let mut counts = [0usize; 7];
    for t in tweets {
        if let Some(dt) = DateTime::from_timestamp(t.created_at, 0) {
            counts[dt.weekday().num_days_from_monday() as usize] += 1;
        }
    }
    counts
}

fn or_missing(present: bool, v: f64) -> f64 {
    if present {
        v
    } else {
        MISSING
    }
}

pub fn temporal_features(tweets: &[Tweet], mentions: &[Tweet], captured_at: Timestamp) -> Block {
    let mut b = Block::new(FeatureClass::Temporal, "temporal");
    let gaps = intervals(tweets);
    let hours = hour_histogram(tweets);
    let night: usize = hours[..6].iter().sum();
    let has = !tweets.is_empty();

    b.push("temporal.tweet_rate_per_hour", "tweets per hour between oldest and newest tweet", rate_per_hour(tweets));
    b.push_stats("temporal.interval", "inter-tweet intervals (s)", "bins=10;scale=linear", &describe(&gaps));
    b.push("temporal.interval_burstiness", "(std - mean)/(std + mean) of intervals", burstiness(&gaps).unwrap_or(MISSING));
    b.push_with(
        "temporal.hour_entropy",
        "bins=24",
        "entropy of the UTC hour-of-day histogram",
        or_missing(has, entropy_of_counts(&hours)),
    );
    b.push(
        "temporal.night_fraction",
        "fraction of tweets posted 00:00-06:00 UTC",
        or_missing(has, night as f64 / tweets.len().max(1) as f64),
    );
    b.push_with(
        "temporal.weekday_entropy",
        "bins=7",
        "entropy of the weekday histogram",
        or_missing(has, entropy_of_counts(&weekday_histogram(tweets))),
    );
    b.push(
        "temporal.hours_since_last_tweet",
        "hours between newest tweet and capture",
        tweets.first().map_or(MISSING, |t| (captured_at - t.created_at) as f64 / 3600.0),
    );

    let mention_gaps = intervals(mentions);
    b.push("temporal.mention_rate_per_hour", "mentions per hour between oldest and newest mention", rate_per_hour(mentions));
    b.push_stats(
        "temporal.mention_interval",
        "inter-mention intervals (s)",
        "bins=10;scale=linear",
        &describe(&mention_gaps),
    );
    b.push(
        "temporal.mention_burstiness",
        "(std - mean)/(std + mean) of mention intervals",
        burstiness(&mention_gaps).unwrap_or(MISSING),
    );
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::graph::tests::tweet;

    fn timeline(times: impl IntoIterator<Item = i64>) -> Vec<Tweet> {
        let mut v: Vec<Tweet> = times
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let mut tw = tweet(&i.to_string(), &[]);
                tw.created_at = t;
                tw
            })
            .collect();
        v.sort_by_key(|t| std::cmp::Reverse(t.created_at));
        v
    }

    #[test]
    fn rate_over_span() {
        // 200 tweets, oldest to newest spans exactly 100 hours
        let step = 100.0 * 3600.0 / 199.0;
        let times: Vec<i64> = (0..200).map(|i| (i as f64 * step).round() as i64).collect();
        assert_eq!(times[199], 360_000);
        let b = temporal_features(&timeline(times), &[], 400_000);
        assert_eq!(b.get("temporal.tweet_rate_per_hour"), Some(2.0));
    }

    #[test]
    fn periodic_posting() {
        let b = temporal_features(&timeline((0..10).map(|i| i * 60)), &[], 1_000);
        assert_eq!(b.get("temporal.interval.std"), Some(0.0));
        assert_eq!(b.get("temporal.interval_burstiness"), Some(-1.0));
        assert_eq!(b.get("temporal.interval.min"), Some(60.0));
        assert_eq!(b.get("temporal.interval.max"), Some(60.0));
    }

    #[test]
    fn night_fraction_and_hour_entropy() {
        // 01:00 and 13:00 on the first day
        let b = temporal_features(&timeline([3600, 13 * 3600]), &[], 90_000);
        assert_eq!(b.get("temporal.night_fraction"), Some(0.5));
        assert_eq!(b.get("temporal.hour_entropy"), Some(1.0));
    }

    #[test]
    fn empty_timeline_sentinels() {
        let b = temporal_features(&[], &[], 0);
        for name in ["temporal.tweet_rate_per_hour", "temporal.hour_entropy", "temporal.interval_burstiness"] {
            assert!(b.get(name).unwrap().is_nan(), "{name}");
        }
    }
}
