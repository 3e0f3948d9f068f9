use std::collections::HashMap;
use std::path::Path;

use super::derivation::DerivationTree;
use super::IngestError;

/// Reserved lexical type for preterminals missing from the lexicon.
pub const UNKNOWN_LEXTYPE: &str = "__unknown_lextype__";

/// Lexical entry name to lexical type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconMap {
    entries: HashMap<String, String>,
}

impl LexiconMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rejects empty keys or values and duplicate keys.
    pub fn insert(
        &mut self,
        entry: impl Into<String>,
        lextype: impl Into<String>,
    ) -> Result<(), IngestError> {
        let entry = entry.into();
        let lextype = lextype.into();
        if entry.is_empty() || lextype.is_empty() {
            return Err(IngestError::malformed(0, "empty lexicon entry or type"));
        }
        if self.entries.contains_key(&entry) {
            return Err(IngestError::DuplicateId(entry));
        }
        self.entries.insert(entry, lextype);
        Ok(())
    }

    pub fn get(&self, entry: &str) -> Option<&str> {
        self.entries.get(entry).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse `entry<TAB>lextype` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut map = LexiconMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split('\t');
            let (Some(entry), Some(lextype), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(IngestError::malformed(line_no, "expected entry<TAB>lextype"));
            };
            map.insert(entry.trim(), lextype.trim()).map_err(|err| match err {
                IngestError::MalformedRecord { reason, .. } => {
                    IngestError::malformed(line_no, reason)
                }
                other => other,
            })?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Self::parse(&text)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for LexiconMap {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        LexiconMap {
            entries: iter
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }
}

/// Labels pulled out of one derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelExtraction {
    /// Every non-preterminal node label, pre-order.
    pub constructions: Vec<String>,
    /// Lexical type of every preterminal, left to right.
    pub lextypes: Vec<String>,
    /// Preterminals that fell back to [`UNKNOWN_LEXTYPE`].
    pub unknown: usize,
}

pub fn extract_labels(tree: &DerivationTree, lexicon: &LexiconMap) -> LabelExtraction {
    let mut out = LabelExtraction::default();
    walk(tree, lexicon, &mut out);
    out
}

fn walk(tree: &DerivationTree, lexicon: &LexiconMap, out: &mut LabelExtraction) {
    let DerivationTree::Node { label, children } = tree else {
        return;
    };
    if tree.is_preterminal() {
        match lexicon.get(label) {
            Some(lextype) => out.lextypes.push(lextype.to_string()),
            None => {
                out.lextypes.push(UNKNOWN_LEXTYPE.to_string());
                out.unknown += 1;
            }
        }
        return;
    }
    out.constructions.push(label.clone());
    for child in children {
        walk(child, lexicon, out);
    }
}
