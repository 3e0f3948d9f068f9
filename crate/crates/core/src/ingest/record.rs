use serde::{Deserialize, Serialize};

use super::derivation::parse_derivation;
use super::lexicon::{extract_labels, LexiconMap};
use super::IngestError;

/// One sentence with its parse outcome, labels and resource costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub id: String,
    pub sentence: String,
    pub token_count: u32,
    pub parsed: bool,
    #[serde(default)]
    pub fragment: bool,
    #[serde(default)]
    pub exceeded_limit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_gb: Option<f64>,
    #[serde(default)]
    pub construction_labels: Vec<String>,
    #[serde(default)]
    pub lextype_labels: Vec<String>,
}

impl ItemRecord {
    /// Parsed and not cut off by a resource limit.
    pub fn is_parsed(&self) -> bool {
        self.parsed && !self.exceeded_limit
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if !self.parsed && !(self.construction_labels.is_empty() && self.lextype_labels.is_empty()) {
            return Err("unparsed item carries labels".into());
        }
        if self.exceeded_limit && self.parsed {
            return Err("item over the resource limit marked as parsed".into());
        }
        if self.fragment && !self.parsed {
            return Err("fragment flag on an unparsed item".into());
        }
        if !self.sentence.trim().is_empty() && self.token_count == 0 {
            return Err("token_count is 0 for a non-empty sentence".into());
        }
        for (name, value) in [("cpu_seconds", self.cpu_seconds), ("memory_gb", self.memory_gb)] {
            if let Some(v) = value {
                if !v.is_finite() || v < 0.0 {
                    return Err(format!("{name} must be a non-negative number, got {v}"));
                }
            }
        }
        for label in self.construction_labels.iter().chain(&self.lextype_labels) {
            if label.is_empty() {
                return Err("empty label".into());
            }
        }
        Ok(())
    }

    pub(crate) fn from_json_line(line: &str, line_no: usize) -> Result<Self, IngestError> {
        let item: ItemRecord = serde_json::from_str(line)
            .map_err(|err| IngestError::malformed(line_no, err.to_string()))?;
        item.validate()
            .map_err(|reason| IngestError::malformed(line_no, reason))?;
        Ok(item)
    }

    pub(crate) fn from_derivation_line(
        line: &str,
        line_no: usize,
        lexicon: &LexiconMap,
    ) -> Result<Self, IngestError> {
        let (id, text) = match line.split_once('\t') {
            Some((id, rest)) if !id.trim_start().starts_with('(') => {
                (id.trim().to_string(), rest)
            }
            _ => (line_no.to_string(), line),
        };
        let tree = parse_derivation(text)
            .map_err(|err| IngestError::malformed(line_no, err.to_string()))?;
        let labels = extract_labels(&tree, lexicon);
        let surfaces = tree.surfaces();
        let item = ItemRecord {
            id,
            sentence: surfaces.join(" "),
            token_count: surfaces.len() as u32,
            parsed: true,
            fragment: false,
            exceeded_limit: false,
            cpu_seconds: None,
            memory_gb: None,
            construction_labels: labels.constructions,
            lextype_labels: labels.lextypes,
        };
        item.validate()
            .map_err(|reason| IngestError::malformed(line_no, reason))?;
        Ok(item)
    }
}
