use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::account::{parse_snapshot, AccountSnapshot, SnapshotError};
use crate::digest::Hasher;

pub const BOTS_FILE: &str = "bots.jsonl";
pub const HUMANS_FILE: &str = "humans.jsonl";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing corpus file {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {source}")]
    Parse {
        file: PathBuf,
        line: usize,
        #[source]
        source: SnapshotError,
    },
    #[error("corpus I/O on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bot,
    Human,
}

impl Label {
    pub fn is_bot(self) -> bool {
        self == Label::Bot
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Bot => "bot",
            Label::Human => "human",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledAccount {
    pub snapshot: AccountSnapshot,
    pub label: Label,
}

/// Bots first, then humans, each in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub accounts: Vec<LabeledAccount>,
    /// Hash over the canonical serialization of every snapshot and label.
    pub digest: String,
}

impl LabeledCorpus {
    pub fn from_accounts(accounts: Vec<LabeledAccount>) -> Self {
        let mut h = Hasher::new();
        for a in &accounts {
            h.update(a.label.to_string());
            h.update(b"\t");
            h.update(a.snapshot.to_json());
            h.update(b"\n");
        }
        LabeledCorpus {
            accounts,
            digest: format!("corpus-{}", h.finish_short()),
        }
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.accounts.iter().map(|a| a.label.is_bot()).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.accounts.iter().filter(|a| a.label == label).count()
    }
}

fn read_file(path: &Path, label: Label, out: &mut Vec<LabeledAccount>) -> Result<(), CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CorpusError::MissingFile(path.to_path_buf()),
        _ => CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_snapshot(&line).map_err(|source| CorpusError::Parse {
            file: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        out.push(LabeledAccount {
            snapshot: parsed.snapshot,
            label,
        });
    }
    Ok(())
}

/// Loads `bots.jsonl` and `humans.jsonl` from `dir`, one snapshot per line.
/// Blank lines are skipped. An empty file is accepted; training on a
/// corpus with a single label fails later.
pub fn load_corpus(dir: &Path) -> Result<LabeledCorpus, CorpusError> {
    let mut accounts = Vec::new();
    read_file(&dir.join(BOTS_FILE), Label::Bot, &mut accounts)?;
    read_file(&dir.join(HUMANS_FILE), Label::Human, &mut accounts)?;
    Ok(LabeledCorpus::from_accounts(accounts))
}

pub fn write_corpus(dir: &Path, corpus: &LabeledCorpus) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir).map_err(|e| CorpusError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for (name, label) in [(BOTS_FILE, Label::Bot), (HUMANS_FILE, Label::Human)] {
        let path = dir.join(name);
        let io = |e| CorpusError::Io {
            path: path.clone(),
            source: e,
        };
        let mut w = BufWriter::new(std::fs::File::create(&path).map_err(io)?);
        for a in corpus.accounts.iter().filter(|a| a.label == label) {
            w.write_all(a.snapshot.to_json().as_bytes()).map_err(io)?;
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::account::tests::minimal_doc;

    fn one_line() -> String {
        let v: serde_json::Value = serde_json::from_str(&minimal_doc()).unwrap();
        v.to_string()
    }

    #[test]
    fn two_single_line_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(BOTS_FILE), one_line() + "\n").unwrap();
        std::fs::write(dir.path().join(HUMANS_FILE), one_line()).unwrap();
        let c = load_corpus(dir.path()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.labels(), vec![true, false]);
    }

    #[test]
    fn empty_bots_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(BOTS_FILE), "").unwrap();
        std::fs::write(dir.path().join(HUMANS_FILE), one_line()).unwrap();
        let c = load_corpus(dir.path()).unwrap();
        assert_eq!(c.count(Label::Bot), 0);
        assert_eq!(c.count(Label::Human), 1);
    }

    #[test]
    fn malformed_line_seven_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::new();
        for _ in 0..6 {
            body += &(one_line() + "\n");
        }
        body += "{not json\n";
        std::fs::write(dir.path().join(BOTS_FILE), body).unwrap();
        std::fs::write(dir.path().join(HUMANS_FILE), one_line()).unwrap();
        let err = load_corpus(dir.path()).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 7, .. }), "{err}");
        assert!(err.to_string().contains(":7:"));
    }

    #[test]
    fn missing_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(BOTS_FILE), one_line()).unwrap();
        assert!(matches!(load_corpus(dir.path()), Err(CorpusError::MissingFile(p)) if p.ends_with(HUMANS_FILE)));
    }

    #[test]
    fn write_then_load_keeps_digest() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(BOTS_FILE), one_line()).unwrap();
        std::fs::write(dir.path().join(HUMANS_FILE), one_line()).unwrap();
        let c = load_corpus(dir.path()).unwrap();
        let out = dir.path().join("copy");
        write_corpus(&out, &c).unwrap();
        assert_eq!(load_corpus(&out).unwrap().digest, c.digest);
    }
}
