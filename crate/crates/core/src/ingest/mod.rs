//! Where snapshots come from: per-account sources for scoring, labeled
//! corpus files for training, and a synthetic corpus generator.

mod corpus;
mod source;
pub mod synth;

pub use corpus::{load_corpus, write_corpus, CorpusError, Label, LabeledAccount, LabeledCorpus, BOTS_FILE, HUMANS_FILE};
pub use source::{fetch_account, DataSource, FetchError, FixtureSource, HttpSource};
pub use synth::{generate_corpus, BotProfile, HumanProfile, SynthParams};
