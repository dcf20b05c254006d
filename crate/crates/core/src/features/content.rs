//! Linguistic features: part-of-speech mix, tweet length, lexical variety and
//! the share of retweets, replies and recycled text.

use std::collections::HashSet;

use crate::account::Tweet;
use crate::stats::{describe, mean_present, std_present, MISSING};

use super::text::{tokenize, PosTag, PosTagger};
use super::{Block, FeatureClass};

fn mean_of(tweets: &[Tweet], f: impl Fn(&Tweet) -> f64) -> f64 {
    if tweets.is_empty() {
        return MISSING;
    }
    tweets.iter().map(f).sum::<f64>() / tweets.len() as f64
}

pub fn content_features(tweets: &[Tweet]) -> Block {
    let tagger = PosTagger::shipped();
    let mut b = Block::new(FeatureClass::Content, "content");
    let tokens: Vec<_> = tweets.iter().map(|t| tokenize(&t.text)).collect();

    // Per-tweet tag frequencies; tweets without words contribute nothing.
    let mut freqs: Vec<Vec<f64>> = vec![Vec::new(); PosTag::ALL.len()];
    for tok in &tokens {
        if tok.words.is_empty() {
            continue;
        }
        let mut counts = [0usize; 9];
        for w in &tok.words {
            counts[tagger.tag(w).index()] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            freqs[i].push(*c as f64 / tok.words.len() as f64);
        }
    }
    for tag in PosTag::ALL {
        let f = &freqs[tag.index()];
        b.push_with(
            format!("content.pos.{}.mean", tag.as_str()),
            "tagger=shipped_lexicon+suffix",
            format!("mean per-tweet share of {} tokens", tag.as_str()),
            mean_present(f),
        );
        b.push_with(
            format!("content.pos.{}.std", tag.as_str()),
            "tagger=shipped_lexicon+suffix",
            format!("std of per-tweet share of {} tokens", tag.as_str()),
            std_present(f),
        );
    }

    let words_per_tweet: Vec<f64> = tokens.iter().map(|t| t.words.len() as f64).collect();
    b.push_stats("content.words_per_tweet", "words per tweet", "bins=10;scale=linear", &describe(&words_per_tweet));
    b.push("content.hashtags_per_tweet", "mean hashtags per tweet", mean_of(tweets, |t| t.hashtags.len() as f64));
    b.push("content.mentions_per_tweet", "mean mentioned users per tweet", mean_of(tweets, |t| t.mentioned_users.len() as f64));
    b.push("content.urls_per_tweet", "mean URLs per tweet", mean_of(tweets, |t| t.url_count as f64));
    b.push("content.retweet_fraction", "share of tweets that are retweets", mean_of(tweets, |t| f64::from(u8::from(t.is_retweet))));
    b.push("content.reply_fraction", "share of tweets that are replies", mean_of(tweets, |t| f64::from(u8::from(t.is_reply))));

    let total_words: usize = tokens.iter().map(|t| t.words.len()).sum();
    let distinct: HashSet<&str> = tokens.iter().flat_map(|t| t.words.iter().map(String::as_str)).collect();
    b.push(
        "content.lexical_diversity",
        "distinct words over total words",
        if total_words > 0 {
            distinct.len() as f64 / total_words as f64
        } else {
            MISSING
        },
    );
    let texts: HashSet<String> = tweets.iter().map(|t| t.text.trim().to_lowercase()).collect();
    b.push(
        "content.duplicate_text_fraction",
        "1 - distinct texts over tweets",
        if tweets.is_empty() {
            MISSING
        } else {
            1.0 - texts.len() as f64 / tweets.len() as f64
        },
    );
    b.push("content.chars_per_tweet", "mean characters per tweet", mean_of(tweets, |t| t.text.chars().count() as f64));
    let word_lengths: Vec<f64> = tokens
        .iter()
        .flat_map(|t| t.words.iter().map(|w| w.chars().count() as f64))
        .collect();
    b.push("content.word_length_mean", "mean characters per word", mean_present(&word_lengths));
    let sources: HashSet<&str> = tweets.iter().map(|t| t.source_client.as_str()).collect();
    b.push("content.distinct_sources", "distinct posting clients", sources.len() as f64);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::account::ContactMeta;
    use crate::features::graph::tests::tweet;

    fn with_text(text: &str) -> Tweet {
        let mut t = tweet("t", &[]);
        t.text = text.into();
        t
    }

    #[test]
    fn the_cat_sat_frequencies() {
        let b = content_features(&[with_text("the cat sat")]);
        assert_eq!(b.get("content.pos.determiner.mean"), Some(1.0 / 3.0));
        assert!(b.get("content.pos.noun.mean").unwrap() >= 1.0 / 3.0);
        assert_eq!(b.get("content.pos.determiner.std"), Some(0.0));
    }

    #[test]
    fn all_retweets() {
        let mut t = with_text("hello");
        t.is_retweet = true;
        t.retweeted_author = Some(ContactMeta {
            user_id: "9".into(),
            followers_count: 0,
            friends_count: 0,
            statuses_count: 0,
            created_at: 0,
        });
        let b = content_features(&[t.clone(), t]);
        assert_eq!(b.get("content.retweet_fraction"), Some(1.0));
        assert_eq!(b.get("content.duplicate_text_fraction"), Some(0.5));
    }

    #[test]
    fn empty_texts() {
        let b = content_features(&[with_text(""), with_text("")]);
        assert_eq!(b.get("content.words_per_tweet.mean"), Some(0.0));
        assert!(b.get("content.lexical_diversity").unwrap().is_nan());
        assert!(b.get("content.pos.noun.mean").unwrap().is_nan());
    }

    #[test]
    fn no_tweets() {
        let b = content_features(&[]);
        assert!(b.get("content.retweet_fraction").unwrap().is_nan());
        assert_eq!(b.len(), 37);
    }
}
