//! Seeded generator of labeled bot and human snapshots.
//!
//! Each account's behavior is split into six trait groups, one per feature
//! class: profile, contacts, interaction structure, timing, writing style
//! and tone. A bot draws each group from the bot profile, except that with
//! probability `overlap` a group is drawn from the human profile instead;
//! humans do the mirror image. The classes therefore overlap group by
//! group, so no single family of features separates them perfectly.
//!
//! Every account has its own ChaCha stream keyed by (label, index), so the
//! output does not depend on thread scheduling.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::corpus::{Label, LabeledAccount, LabeledCorpus};
use crate::account::{AccountSnapshot, ContactMeta, MentionedUser, Timestamp, Tweet, UserMeta};

const DAY: i64 = 86_400;
/// 2014-06-01T00:00:00Z; captures are spread over the following 60 days.
const CAPTURE_BASE: Timestamp = 1_401_580_800;

#[derive(Debug, Error)]
#[error("invalid synthetic corpus parameters: {0}")]
pub struct SynthError(String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BotProfile {
    /// 1 means perfectly periodic posting.
    pub interval_regularity: f64,
    /// Share of tweets carrying hashtags.
    pub hashtag_rate: f64,
    /// Share of the spam vocabulary each bot draws from.
    pub lexical_diversity: f64,
    /// Share of tweets that repeat an earlier text verbatim.
    pub duplicate_text_rate: f64,
    /// 0 means followers track followees; near 1 means far fewer followers.
    pub follower_friend_skew: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanProfile {
    /// Share of tweets pushed out of the local night.
    pub diurnal_strength: f64,
    pub reply_rate: f64,
    /// Distinct words available to each human (capped at the word pool).
    pub vocabulary_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub bots: usize,
    pub humans: usize,
    pub bot: BotProfile,
    pub human: HumanProfile,
    /// Chance that one trait group of an account follows the other class.
    pub overlap: f64,
}

impl SynthParams {
    pub fn new(seed: u64, bots: usize, humans: usize) -> Self {
        SynthParams {
            seed,
            bots,
            humans,
            bot: BotProfile {
                interval_regularity: 0.85,
                hashtag_rate: 0.7,
                lexical_diversity: 0.35,
                duplicate_text_rate: 0.5,
                follower_friend_skew: 0.8,
            },
            human: HumanProfile {
                diurnal_strength: 0.85,
                reply_rate: 0.3,
                vocabulary_size: 150,
            },
            overlap: 0.15,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.bots == 0 || self.humans == 0 {
            return Err(SynthError("both class counts must be at least 1".into()));
        }
        let rates = [
            ("bot.interval_regularity", self.bot.interval_regularity),
            ("bot.hashtag_rate", self.bot.hashtag_rate),
            ("bot.lexical_diversity", self.bot.lexical_diversity),
            ("bot.duplicate_text_rate", self.bot.duplicate_text_rate),
            ("bot.follower_friend_skew", self.bot.follower_friend_skew),
            ("human.diurnal_strength", self.human.diurnal_strength),
            ("human.reply_rate", self.human.reply_rate),
            ("overlap", self.overlap),
        ];
        for (name, v) in rates {
            if !(0.0..=1.0).contains(&v) {
                return Err(SynthError(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.human.vocabulary_size < 10 {
            return Err(SynthError("human.vocabulary_size must be at least 10".into()));
        }
        Ok(())
    }
}

const SPAM_WORDS: &[&str] = &[
    "free", "win", "giveaway", "deal", "click", "follow", "buy", "offer", "prize", "money", "new",
    "best", "exclusive", "limited", "sale", "crypto", "bonus", "now", "link", "news", "phone",
    "shoes", "watch", "bag", "shirt", "laptop", "headphones", "discount", "code", "today", "hot",
    "price", "shipping", "promo", "store", "cash", "earn", "fast", "easy", "followers",
];

const HUMAN_WORDS: &[&str] = &[
    "love", "happy", "friend", "friends", "family", "coffee", "tired", "sad", "movie", "weekend",
    "work", "dinner", "game", "music", "rain", "sleep", "funny", "beautiful", "terrible", "miss",
    "lunch", "dog", "cat", "school", "book", "good", "bad", "great", "hate", "angry", "sick",
    "lol", "haha", "thanks", "awesome", "amazing", "nice", "cool", "fun", "party", "birthday",
    "hope", "night", "morning", "today", "late", "traffic", "monday", "home", "beach", "pizza",
    "tea", "friday", "ugh", "bored", "lonely", "train", "bus", "city", "park", "phone", "email",
    "meeting", "project", "paper", "class", "exam", "team", "match", "score", "goal", "season",
    "show", "episode", "song", "album", "concert", "ticket", "market", "garden", "kitchen", "car",
    "road", "bike", "walk", "run", "gym", "office", "boss", "client", "report", "deadline",
    "weather", "sun", "snow", "wind", "storm", "bread", "cheese", "soup", "salad", "cake",
    "cookie", "chocolate", "apple", "orange", "window", "door", "room", "house", "street",
    "river", "lake", "mountain", "trip", "flight", "hotel", "airport", "photo", "video",
    "picture", "story", "idea", "plan", "question", "answer", "problem", "sister", "brother",
    "mom", "dad", "baby", "kids", "teacher", "doctor", "finally", "really", "totally", "honestly",
    "watching", "reading", "cooking", "playing", "waiting", "thinking", "laughing", "crying",
    "excited", "nervous", "proud", "grateful", "sorry", "cold", "warm", "quiet", "loud",
];

const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "i", "you", "we", "it", "is", "was", "to", "of", "in", "on", "at", "with", "my",
    "your", "this", "that", "so", "just", "not", "but", "and", "for", "me", "our", "are", "have",
];

const POSITIVE_EMOTICONS: &[&str] = &[":)", ":-)", ":D", ";)", "<3"];
const NEGATIVE_EMOTICONS: &[&str] = &[":(", ":-(", ":'("];

const BOT_TAGS: &[&str] = &[
    "win", "free", "giveaway", "deal", "sale", "crypto", "bitcoin", "followback", "teamfollowback",
    "promo", "discount", "money", "forex", "seo", "marketing", "follow",
];

const HUMAN_TAGS: &[&str] = &[
    "tbt", "fridayfeeling", "mondaymotivation", "nba", "worldcup", "oscars", "gameofthrones",
    "foodie", "travel", "music", "nowplaying", "books", "photography", "coffee", "love", "family",
    "weekend", "summer", "rain", "election", "news", "science", "art", "fitness", "dogs", "cats",
    "nofilter", "goals", "throwback", "fail", "win", "halloween", "christmas", "birthday",
    "movies", "netflix", "tech", "startup", "python", "running",
];

const NAME_PARTS: &[&str] = &[
    "sam", "kate", "alex", "jo", "maria", "li", "omar", "anna", "ben", "nina", "leo", "sara",
    "tom", "eva", "max", "zoe", "ravi", "mia", "dan", "ivy", "sun", "moon", "star", "blue",
    "happy", "cool", "real", "the", "just", "its",
];

const BOT_CLIENTS: &[&str] = &["autopost", "twitterfeed", "dlvr.it", "ifttt", "botmaker"];
const HUMAN_CLIENTS: &[&str] = &["web", "iphone", "android", "tweetdeck", "ipad"];

/// Whether each trait group of one account follows the bot profile.
#[derive(Debug, Clone, Copy)]
struct Traits {
    profile: bool,
    contacts: bool,
    interaction: bool,
    timing: bool,
    style: bool,
    tone: bool,
}

fn lognormal(rng: &mut ChaCha8Rng, median: f64, sigma: f64) -> f64 {
    LogNormal::new(median.ln(), sigma).expect("valid lognormal").sample(rng)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn count(x: f64) -> u64 {
    x.max(0.0).round() as u64
}

fn contact(rng: &mut ChaCha8Rng, id: String, botlike: bool, now: Timestamp) -> ContactMeta {
    if botlike {
        let friends = lognormal(rng, 1200.0, 0.8);
        ContactMeta {
            user_id: id,
            followers_count: count(lognormal(rng, 60.0, 1.2)),
            friends_count: count(friends),
            statuses_count: count(lognormal(rng, 4000.0, 1.0)),
            created_at: now - rng.random_range(5..450) * DAY,
        }
    } else {
        let followers = lognormal(rng, 300.0, 1.3);
        ContactMeta {
            user_id: id,
            followers_count: count(followers),
            friends_count: count(followers * lognormal(rng, 1.0, 0.6)),
            statuses_count: count(lognormal(rng, 2500.0, 1.2)),
            created_at: now - rng.random_range(150..3000) * DAY,
        }
    }
}

fn screen_name(rng: &mut ChaCha8Rng, botlike: bool, index: usize) -> String {
    let a = NAME_PARTS.choose(rng).unwrap();
    if botlike && rng.random_bool(0.7) {
        let digits = rng.random_range(1000..99_999_999u64);
        format!("{a}{digits}")
    } else {
        let b = NAME_PARTS.choose(rng).unwrap();
        if rng.random_bool(0.3) {
            format!("{a}_{b}{}", rng.random_range(1..99))
        } else {
            // Keep human-style names unique without digits dominating.
            format!("{a}_{b}_{}", to_letters(index))
        }
    }
}

fn to_letters(mut n: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            return s;
        }
    }
}

fn user_meta(rng: &mut ChaCha8Rng, p: &SynthParams, t: &Traits, id: &str, name: String, now: Timestamp) -> UserMeta {
    let digits_in_display = t.profile && rng.random_bool(0.3);
    let display_name = if digits_in_display {
        format!("{} {}", NAME_PARTS.choose(rng).unwrap(), rng.random_range(10..999))
    } else {
        format!("{} {}", NAME_PARTS.choose(rng).unwrap(), NAME_PARTS.choose(rng).unwrap())
    };
    if t.profile {
        let age_days = rng.random_range(5..700);
        let friends = log_uniform(rng, 200.0, 5000.0);
        let skew = p.bot.follower_friend_skew;
        let followers = friends * (1.0 - skew).max(0.01) * lognormal(rng, 1.0, 0.8);
        UserMeta {
            user_id: id.to_string(),
            screen_name: name,
            display_name,
            description: if rng.random_bool(0.5) {
                String::new()
            } else {
                "best deals daily follow for more".into()
            },
            language: "en".into(),
            location: String::new(),
            url_present: rng.random_bool(0.6),
            created_at: now - age_days * DAY - rng.random_range(0..DAY),
            followers_count: count(followers),
            friends_count: count(friends),
            statuses_count: count(age_days as f64 * log_uniform(rng, 10.0, 150.0)),
            listed_count: rng.random_range(0..4),
            favourites_count: rng.random_range(0..60),
            verified: false,
            default_profile: rng.random_bool(0.7),
        }
    } else {
        let age_days = rng.random_range(150..2800);
        let followers = lognormal(rng, 250.0, 1.2);
        let statuses = age_days as f64 * log_uniform(rng, 0.5, 15.0);
        UserMeta {
            user_id: id.to_string(),
            screen_name: name,
            display_name,
            description: if rng.random_bool(0.15) {
                String::new()
            } else {
                "coffee, books and bad puns".into()
            },
            language: if rng.random_bool(0.85) { "en" } else { "es" }.into(),
            location: if rng.random_bool(0.6) { "somewhere".into() } else { String::new() },
            url_present: rng.random_bool(0.3),
            created_at: now - age_days * DAY - rng.random_range(0..DAY),
            followers_count: count(followers),
            friends_count: count(followers * lognormal(rng, 1.0, 0.6)),
            statuses_count: count(statuses),
            listed_count: count(followers * rng.random_range(0.0..0.05)),
            favourites_count: count(statuses * rng.random_range(0.1..1.5)),
            verified: rng.random_bool(0.02),
            default_profile: rng.random_bool(0.2),
        }
    }
}

/// Posting times, newest first, all strictly before `now`.
fn own_times(rng: &mut ChaCha8Rng, p: &SynthParams, periodic: bool, n: usize, tz_hours: i64, now: Timestamp) -> Vec<Timestamp> {
    let mut out = Vec::with_capacity(n);
    if periodic {
        let period = log_uniform(rng, 600.0, 14_400.0);
        let cv = (1.0 - p.bot.interval_regularity) * rng.random_range(0.3..1.7);
        let jitter = Normal::new(0.0, cv.max(1e-9)).expect("valid normal");
        let mut t = now as f64 - rng.random_range(0.0..period);
        for _ in 0..n {
            out.push(t as Timestamp);
            let step = period * (1.0 + jitter.sample(rng)).max(0.05);
            t -= step;
        }
    } else {
        let mean_gap = log_uniform(rng, 1800.0, 43_200.0);
        let long = Exp::new(1.0 / mean_gap).expect("valid exponential");
        let mut t = now - rng.random_range(60..7200);
        for _ in 0..n {
            let local = (t + tz_hours * 3600).rem_euclid(DAY);
            let hour = local / 3600;
            if (1..8).contains(&hour) && rng.random_bool(p.human.diurnal_strength) {
                // Move back into the previous evening.
                t -= local + rng.random_range(0..3 * 3600);
            }
            out.push(t);
            let gap = if rng.random_bool(0.35) {
                rng.random_range(30.0..900.0)
            } else {
                long.sample(rng)
            };
            t -= gap.max(1.0) as Timestamp;
        }
    }
    out
}

fn pick_words(rng: &mut ChaCha8Rng, pool: &[&'static str], len: usize, with_function_words: bool) -> Vec<&'static str> {
    (0..len)
        .map(|_| {
            if with_function_words && rng.random_bool(0.4) {
                *FUNCTION_WORDS.choose(rng).unwrap()
            } else {
                *pool.choose(rng).unwrap()
            }
        })
        .collect()
}

struct Others {
    /// Frequent partners: retweet sources and reply targets for humans.
    circle: Vec<(MentionedUser, ContactMeta)>,
}

fn generate_account(p: &SynthParams, label: Label, index: usize) -> AccountSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let stream = index as u64 * 2 + u64::from(label == Label::Human);
    rng.set_stream(stream);
    let is_bot = label == Label::Bot;
    let group = |rng: &mut ChaCha8Rng| rng.random_bool(p.overlap) != is_bot;
    let t = Traits {
        profile: group(&mut rng),
        contacts: group(&mut rng),
        interaction: group(&mut rng),
        timing: group(&mut rng),
        style: group(&mut rng),
        tone: group(&mut rng),
    };

    let now = CAPTURE_BASE + rng.random_range(0..60) * DAY + rng.random_range(0..DAY);
    let user_id = rng.random_range(10_000_000u64..9_000_000_000).to_string();
    let name = screen_name(&mut rng, t.profile, index * 2 + usize::from(!is_bot));
    let user = user_meta(&mut rng, p, &t, &user_id, name, now);
    let tz_hours = *[-8i64, -6, -5, 0, 1, 2, 3, 5, 8, 9].choose(&mut rng).unwrap();

    let mut next_other = 0u32;
    let mut other = |rng: &mut ChaCha8Rng, botlike: bool| -> (MentionedUser, ContactMeta) {
        next_other += 1;
        let id = format!("{user_id}{next_other:04}");
        let sn = format!("{}{}", NAME_PARTS.choose(rng).unwrap(), next_other);
        let meta = contact(rng, id.clone(), botlike, now);
        (MentionedUser { user_id: id, screen_name: sn }, meta)
    };

    let circle_size = if t.interaction { rng.random_range(2..6) } else { rng.random_range(10..40) };
    let others = Others {
        circle: (0..circle_size).map(|_| other(&mut rng, t.contacts)).collect(),
    };

    // Vocabulary.
    let (word_pool, fresh_len): (Vec<&'static str>, (usize, usize)) = if t.tone {
        let k = ((SPAM_WORDS.len() as f64 * p.bot.lexical_diversity).round() as usize).clamp(5, SPAM_WORDS.len());
        let mut w: Vec<&'static str> = SPAM_WORDS.choose_multiple(&mut rng, k).copied().collect();
        w.sort_unstable();
        (w, (5, 11))
    } else {
        let k = p.human.vocabulary_size.min(HUMAN_WORDS.len());
        let mut w: Vec<&'static str> = HUMAN_WORDS.choose_multiple(&mut rng, k).copied().collect();
        w.sort_unstable();
        (w, (4, 19))
    };
    let emoticon_rate = if t.tone { rng.random_range(0.0..0.04) } else { rng.random_range(0.08..0.35) };
    let positive_share = rng.random_range(0.5..0.9);

    // Style.
    let (dup_rate, tag_rate, url_rate, rt_rate, reply_rate): (f64, f64, f64, f64, f64) = if t.style {
        (
            p.bot.duplicate_text_rate * rng.random_range(0.5..1.5),
            p.bot.hashtag_rate * rng.random_range(0.7..1.3),
            rng.random_range(0.5..0.95),
            rng.random_range(0.1..0.5),
            rng.random_range(0.0..0.05),
        )
    } else {
        (
            rng.random_range(0.0..0.04),
            rng.random_range(0.02..0.25),
            rng.random_range(0.02..0.3),
            rng.random_range(0.05..0.35),
            p.human.reply_rate * rng.random_range(0.5..1.5),
        )
    };
    let clients: Vec<&str> = if t.style {
        vec![BOT_CLIENTS.choose(&mut rng).unwrap()]
    } else {
        let n = rng.random_range(1..4);
        HUMAN_CLIENTS.choose_multiple(&mut rng, n).copied().collect()
    };
    let tag_pool: Vec<&str> = if t.interaction {
        let n = rng.random_range(3..7);
        BOT_TAGS.choose_multiple(&mut rng, n).copied().collect()
    } else {
        HUMAN_TAGS.to_vec()
    };
    let text_pool: Vec<String> = (0..rng.random_range(3..10))
        .map(|_| {
            let len = rng.random_range(fresh_len.0..fresh_len.1);
            pick_words(&mut rng, &word_pool, len, !t.tone).join(" ")
        })
        .collect();

    let n_tweets = if is_bot { rng.random_range(60..160) } else { rng.random_range(40..160) };
    let times = own_times(&mut rng, p, t.timing, n_tweets, tz_hours, now);
    let mut tweets = Vec::with_capacity(n_tweets);
    for (i, &created_at) in times.iter().enumerate() {
        let mut words: Vec<String> = Vec::new();
        let mut mentioned = Vec::new();
        let mut retweeted_author = None;
        let is_retweet = rng.random_bool(rt_rate.clamp(0.0, 1.0));
        let is_reply = !is_retweet && rng.random_bool(reply_rate.clamp(0.0, 1.0));
        if is_retweet {
            let (mu, meta) = others.circle.choose(&mut rng).unwrap().clone();
            words.push("RT".into());
            words.push(format!("@{}:", mu.screen_name));
            retweeted_author = Some(meta);
        }
        if is_reply {
            let (mu, _) = if t.interaction {
                other(&mut rng, t.contacts)
            } else {
                others.circle.choose(&mut rng).unwrap().clone()
            };
            words.push(format!("@{}", mu.screen_name));
            mentioned.push(mu);
        } else if t.interaction && rng.random_bool(0.3) {
            // Unsolicited mentions of strangers.
            let (mu, _) = other(&mut rng, t.contacts);
            words.push(format!("@{}", mu.screen_name));
            mentioned.push(mu);
        }
        let body = if rng.random_bool(dup_rate.clamp(0.0, 1.0)) {
            text_pool.choose(&mut rng).unwrap().clone()
        } else {
            let len = rng.random_range(fresh_len.0..fresh_len.1);
            pick_words(&mut rng, &word_pool, len, !t.tone).join(" ")
        };
        words.push(body);
        let mut hashtags = Vec::new();
        if rng.random_bool(tag_rate.clamp(0.0, 1.0)) {
            let n = if t.interaction { rng.random_range(1..4) } else { rng.random_range(1..3) };
            for tag in tag_pool.choose_multiple(&mut rng, n) {
                words.push(format!("#{tag}"));
                hashtags.push(tag.to_string());
            }
        }
        let url_count = u64::from(rng.random_bool(url_rate.clamp(0.0, 1.0)));
        if url_count > 0 {
            words.push(format!("http://t.co/{:08x}", rng.random::<u32>()));
        }
        if rng.random_bool(emoticon_rate) {
            let set = if rng.random_bool(positive_share) { POSITIVE_EMOTICONS } else { NEGATIVE_EMOTICONS };
            words.push(set.choose(&mut rng).unwrap().to_string());
        }
        tweets.push(Tweet {
            tweet_id: format!("{user_id}-{i}"),
            author_id: user_id.clone(),
            created_at,
            text: words.join(" "),
            hashtags,
            mentioned_users: mentioned,
            url_count,
            is_retweet,
            retweeted_author,
            is_reply,
            retweet_count: if is_retweet { 0 } else { count(lognormal(&mut rng, 1.0, 1.2) - 1.0) },
            favorite_count: if is_retweet { 0 } else { count(lognormal(&mut rng, 1.5, 1.2) - 1.0) },
            source_client: clients.choose(&mut rng).unwrap().to_string(),
            author: None,
        });
    }

    // Mentions by others.
    let n_mentions = if t.interaction { rng.random_range(0..15) } else { rng.random_range(5..80) };
    let ego = MentionedUser {
        user_id: user_id.clone(),
        screen_name: user.screen_name.clone(),
    };
    let mention_times: Vec<Timestamp> = if t.timing {
        let mut v: Vec<Timestamp> = (0..n_mentions).map(|_| now - rng.random_range(60..30 * DAY)).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    } else {
        own_times(&mut rng, p, false, n_mentions, tz_hours, now)
    };
    let mut mentions = Vec::with_capacity(n_mentions);
    for (i, &created_at) in mention_times.iter().enumerate() {
        let (author, meta) = if t.interaction {
            other(&mut rng, t.contacts)
        } else {
            others.circle.choose(&mut rng).unwrap().clone()
        };
        let len = rng.random_range(3..10);
        let mut text = format!("@{} {}", ego.screen_name, pick_words(&mut rng, HUMAN_WORDS, len, true).join(" "));
        if !t.tone && rng.random_bool(0.2) {
            text.push_str(" :)");
        }
        mentions.push(Tweet {
            tweet_id: format!("{}-m{i}", author.user_id),
            author_id: author.user_id.clone(),
            created_at,
            text,
            hashtags: Vec::new(),
            mentioned_users: vec![ego.clone()],
            url_count: 0,
            is_retweet: false,
            retweeted_author: None,
            is_reply: rng.random_bool(0.5),
            retweet_count: 0,
            favorite_count: count(lognormal(&mut rng, 1.0, 1.0) - 1.0),
            source_client: HUMAN_CLIENTS.choose(&mut rng).unwrap().to_string(),
            author: Some(meta),
        });
    }

    let contacts: Vec<ContactMeta> = others.circle.iter().map(|(_, m)| m.clone()).collect();
    let raw = AccountSnapshot {
        user,
        tweets,
        mentions,
        contacts,
        captured_at: now,
    };
    AccountSnapshot::validate(raw)
        .expect("generated snapshots satisfy the schema")
        .snapshot
}

/// Generates `params.bots` bots followed by `params.humans` humans.
pub fn generate_corpus(params: &SynthParams) -> Result<LabeledCorpus, SynthError> {
    params.validate()?;
    let jobs: Vec<(Label, usize)> = (0..params.bots)
        .map(|i| (Label::Bot, i))
        .chain((0..params.humans).map(|i| (Label::Human, i)))
        .collect();
    let accounts = jobs
        .into_par_iter()
        .map(|(label, i)| LabeledAccount {
            snapshot: generate_account(params, label, i),
            label,
        })
        .collect();
    Ok(LabeledCorpus::from_accounts(accounts))
}
