//! Loading corpora: JSONL item records, or derivation exports plus a lexicon.

pub mod derivation;
pub mod lexicon;
pub mod punct;
mod record;

use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use derivation::{parse_derivation, DerivationError, DerivationTree};
pub use lexicon::{extract_labels, LabelExtraction, LexiconMap, UNKNOWN_LEXTYPE};
pub use punct::{classify_punctuation, default_punct_config, PunctConfig};
pub use record::ItemRecord;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("invalid pattern {pattern:?} at line {line}: {reason}")]
    InvalidPattern {
        line: usize,
        pattern: String,
        reason: String,
    },
    #[error("corpus {0:?} has no items")]
    EmptyCorpus(String),
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        IngestError::MalformedRecord {
            line,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Human,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub source_kind: SourceKind,
    pub year_tag: String,
    pub items: Vec<ItemRecord>,
}

impl Corpus {
    pub fn parsed_items(&self) -> impl Iterator<Item = &ItemRecord> {
        self.items.iter().filter(|item| item.is_parsed())
    }

    /// Lexical-type labels that fell back to the reserved unknown label.
    pub fn unknown_lextypes(&self) -> usize {
        self.items
            .iter()
            .flat_map(|item| &item.lextype_labels)
            .filter(|label| label.as_str() == UNKNOWN_LEXTYPE)
            .count()
    }
}

/// Corpus-level metadata supplied alongside the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusMeta {
    pub name: String,
    pub source_kind: SourceKind,
    pub year_tag: String,
    pub allow_empty: bool,
}

impl CorpusMeta {
    pub fn new(name: impl Into<String>, source_kind: SourceKind, year_tag: impl Into<String>) -> Self {
        CorpusMeta {
            name: name.into(),
            source_kind,
            year_tag: year_tag.into(),
            allow_empty: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CorpusFormat<'a> {
    Jsonl,
    /// One s-expression per line, optionally prefixed by `id<TAB>`.
    Derivations { lexicon: &'a LexiconMap },
}

pub fn load_corpus(
    path: &Path,
    format: CorpusFormat<'_>,
    meta: &CorpusMeta,
) -> Result<Corpus, IngestError> {
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_corpus(BufReader::new(file), format, meta).map_err(|err| match err {
        IngestError::Io { source, .. } => IngestError::io(path, source),
        other => other,
    })
}

/// Same as [`load_corpus`] over any reader; line numbers are 1-based.
pub fn read_corpus<R: BufRead>(
    reader: R,
    format: CorpusFormat<'_>,
    meta: &CorpusMeta,
) -> Result<Corpus, IngestError> {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| IngestError::io(Path::new("<reader>"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = match format {
            CorpusFormat::Jsonl => ItemRecord::from_json_line(&line, line_no)?,
            CorpusFormat::Derivations { lexicon } => {
                ItemRecord::from_derivation_line(&line, line_no, lexicon)?
            }
        };
        if !seen.insert(item.id.clone()) {
            return Err(IngestError::DuplicateId(item.id));
        }
        items.push(item);
    }
    if items.is_empty() && !meta.allow_empty {
        return Err(IngestError::EmptyCorpus(meta.name.clone()));
    }
    let corpus = Corpus {
        name: meta.name.clone(),
        source_kind: meta.source_kind,
        year_tag: meta.year_tag.clone(),
        items,
    };
    let unknown = corpus.unknown_lextypes();
    if unknown > 0 {
        log::warn!(
            "{}: {unknown} preterminal(s) missing from the lexicon",
            corpus.name
        );
    }
    Ok(corpus)
}

/// Serialize items back to canonical JSONL.
pub fn write_jsonl<W: std::io::Write>(items: &[ItemRecord], mut out: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
