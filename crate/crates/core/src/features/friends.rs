//! Distributional features over the account's contacts.

use crate::account::{ContactMeta, Timestamp};
use crate::stats::{describe_scaled, BinScale};

use super::{Block, FeatureClass};

pub fn friends_features(contacts: &[ContactMeta], captured_at: Timestamp) -> Block {
    let mut b = Block::new(FeatureClass::Friends, "friends");
    b.push("friends.contact_count", "distinct contacts observed", contacts.len() as f64);
    let columns: [(&str, &str, Vec<f64>); 4] = [
        ("followers", "contact follower counts", contacts.iter().map(|c| c.followers_count as f64).collect()),
        ("followees", "contact followee counts", contacts.iter().map(|c| c.friends_count as f64).collect()),
        ("statuses", "contact status counts", contacts.iter().map(|c| c.statuses_count as f64).collect()),
        (
            "age_days",
            "contact account ages in days",
            contacts
                .iter()
                .map(|c| ((captured_at - c.created_at) as f64 / 86_400.0).max(0.0))
                .collect(),
        ),
    ];
    for (name, what, values) in &columns {
        b.push_stats(
            &format!("friends.{name}"),
            what,
            "bins=10;scale=log",
            &describe_scaled(values, BinScale::Log),
        );
    }
    b
}
