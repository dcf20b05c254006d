//! Profile metadata features.

use crate::account::{Timestamp, UserMeta};
use crate::stats::MISSING;

use super::{Block, FeatureClass};

const SECONDS_PER_DAY: f64 = 86_400.0;
/// Language codes are bucketed into this many stable buckets.
pub const LANGUAGE_BUCKETS: u64 = 64;

/// FNV-1a over the UTF-8 bytes, reduced mod [`LANGUAGE_BUCKETS`].
pub fn language_bucket(code: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in code.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h % LANGUAGE_BUCKETS
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        MISSING
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn user_features(meta: &UserMeta, captured_at: Timestamp) -> Block {
    let mut b = Block::new(FeatureClass::User, "user");
    let age_days = (captured_at - meta.created_at) as f64 / SECONDS_PER_DAY;
    let followers = meta.followers_count as f64;
    let friends = meta.friends_count as f64;

    b.push("user.account_age_days", "days between account creation and capture", age_days);
    b.push("user.statuses_per_day", "lifetime statuses over account age", ratio(meta.statuses_count as f64, age_days));
    b.push("user.followers_per_day", "followers over account age", ratio(followers, age_days));
    b.push("user.friends_per_day", "followees over account age", ratio(friends, age_days));
    b.push("user.favourites_per_day", "favourites over account age", ratio(meta.favourites_count as f64, age_days));
    b.push("user.statuses_count", "lifetime statuses", meta.statuses_count as f64);
    b.push("user.followers_count", "followers", followers);
    b.push("user.friends_count", "followees", friends);
    b.push("user.follower_friend_ratio", "followers over followees", ratio(followers, friends));
    b.push("user.log_followers", "ln(1 + followers)", followers.ln_1p());
    b.push("user.log_friends", "ln(1 + followees)", friends.ln_1p());
    b.push("user.listed_count", "lists containing the account", meta.listed_count as f64);
    b.push("user.listed_per_follower", "lists over followers", ratio(meta.listed_count as f64, followers));
    b.push("user.favourites_count", "tweets favourited by the account", meta.favourites_count as f64);
    b.push("user.screen_name_length", "characters in the screen name", meta.screen_name.chars().count() as f64);
    b.push(
        "user.screen_name_digits",
        "digits in the screen name",
        meta.screen_name.chars().filter(char::is_ascii_digit).count() as f64,
    );
    b.push("user.display_name_length", "characters in the display name", meta.display_name.chars().count() as f64);
    b.push("user.description_length", "characters in the profile description", meta.description.chars().count() as f64);
    b.push("user.verified", "verified badge (0/1)", flag(meta.verified));
    b.push("user.default_profile", "untouched default profile (0/1)", flag(meta.default_profile));
    b.push("user.url_present", "profile links a URL (0/1)", flag(meta.url_present));
    b.push("user.has_location", "location field nonempty (0/1)", flag(!meta.location.trim().is_empty()));
    b.push("user.has_language", "language code nonempty (0/1)", flag(!meta.language.is_empty()));
    b.push_with(
        "user.language_bucket",
        format!("fnv1a_mod={LANGUAGE_BUCKETS}"),
        "stable hash bucket of the language code",
        language_bucket(&meta.language) as f64,
    );
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::account::AccountSnapshot;

    fn meta() -> UserMeta {
        let mut m = AccountSnapshot::blank().user;
        m.created_at = 0;
        m
    }

    #[test]
    fn statuses_per_day() {
        let mut m = meta();
        m.statuses_count = 500;
        let b = user_features(&m, 100 * 86_400);
        assert_eq!(b.get("user.account_age_days"), Some(100.0));
        assert_eq!(b.get("user.statuses_per_day"), Some(5.0));
    }

    #[test]
    fn follower_ratio() {
        let mut m = meta();
        m.followers_count = 100;
        m.friends_count = 50;
        assert_eq!(user_features(&m, 86_400).get("user.follower_friend_ratio"), Some(2.0));
    }

    #[test]
    fn zero_followees_ratio_missing() {
        let mut m = meta();
        m.followers_count = 100;
        assert!(user_features(&m, 86_400).get("user.follower_friend_ratio").unwrap().is_nan());
    }

    #[test]
    fn language_bucket_is_stable() {
        // FNV-1a("en") = 0x088e3807b53946aa, and 0x...aa % 64 = 42
        assert_eq!(language_bucket("en"), 42);
        assert_eq!(language_bucket("en"), language_bucket("en"));
        assert!(language_bucket("pt-br") < 64);
    }
}
