//! Tweet tokenization and a small lexicon + suffix-rule part-of-speech tagger.

use std::collections::HashMap;
use std::sync::OnceLock;

use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Determiner,
    Preposition,
    Interjection,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 9] = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adjective,
        PosTag::Adverb,
        PosTag::Pronoun,
        PosTag::Determiner,
        PosTag::Preposition,
        PosTag::Interjection,
        PosTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "noun",
            PosTag::Verb => "verb",
            PosTag::Adjective => "adjective",
            PosTag::Adverb => "adverb",
            PosTag::Pronoun => "pronoun",
            PosTag::Determiner => "determiner",
            PosTag::Preposition => "preposition",
            PosTag::Interjection => "interjection",
            PosTag::Other => "other",
        }
    }

    fn parse(s: &str) -> Option<PosTag> {
        PosTag::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One tweet split into words and the tokens stripped out of them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tokens {
    /// Lowercased words, URLs, mentions and hashtags removed.
    pub words: Vec<String>,
    /// Whitespace-delimited tokens, for emoticon matching.
    pub raw: Vec<String>,
    pub urls: usize,
    pub mentions: usize,
    pub hashtags: usize,
}

fn is_url(token: &str) -> bool {
    let t = token.to_ascii_lowercase();
    t.starts_with("http://") || t.starts_with("https://") || t.starts_with("www.")
}

pub fn tokenize(text: &str) -> Tokens {
    let mut out = Tokens::default();
    for token in text.split_whitespace() {
        out.raw.push(token.to_string());
        if is_url(token) {
            out.urls += 1;
        } else if token.len() > 1 && token.starts_with('@') {
            out.mentions += 1;
        } else if token.len() > 1 && token.starts_with('#') {
            out.hashtags += 1;
        } else {
            out.words.extend(token.unicode_words().map(str::to_lowercase));
        }
    }
    out
}

const SHIPPED_LEXICON: &str = include_str!("../../data/pos_lexicon.tsv");

/// Closed-class lexicon lookup, then suffix rules, defaulting to noun.
#[derive(Debug, Clone)]
pub struct PosTagger {
    lexicon: HashMap<String, PosTag>,
}

impl PosTagger {
    /// Parses `word<TAB>tag` lines; `#` starts a comment line.
    pub fn from_tsv(src: &str) -> Result<Self, String> {
        let mut lexicon = HashMap::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected word<TAB>tag", i + 1))?;
            let tag = PosTag::parse(tag.trim()).ok_or_else(|| format!("line {}: unknown tag `{tag}`", i + 1))?;
            lexicon.insert(word.trim().to_lowercase(), tag);
        }
        Ok(PosTagger { lexicon })
    }

    pub fn shipped() -> &'static PosTagger {
        static TAGGER: OnceLock<PosTagger> = OnceLock::new();
        TAGGER.get_or_init(|| PosTagger::from_tsv(SHIPPED_LEXICON).expect("shipped lexicon is valid"))
    }

    pub fn tag(&self, word: &str) -> PosTag {
        if let Some(t) = self.lexicon.get(word) {
            return *t;
        }
        if word.chars().any(|c| c.is_numeric()) && !word.chars().any(char::is_alphabetic) {
            return PosTag::Other;
        }
        let n = word.chars().count();
        let ends = |s: &str| word.ends_with(s);
        if n > 4 && ends("ly") {
            return PosTag::Adverb;
        }
        if (n > 4 && ends("ing")) || (n > 3 && ends("ed")) {
            return PosTag::Verb;
        }
        if n > 4 && ["ous", "ful", "able", "ible", "ive", "less", "ical", "ish"].iter().any(|s| ends(s)) {
            return PosTag::Adjective;
        }
        PosTag::Noun
    }
}
