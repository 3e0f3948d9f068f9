use std::path::Path;

use glob::Pattern;

use super::IngestError;

/// Pattern list shipped with the crate (`data/punct_patterns.txt`).
pub const DEFAULT_PATTERNS: &str = include_str!("../../data/punct_patterns.txt");

/// Glob patterns deciding which lexical types count as punctuation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PunctConfig {
    patterns: Vec<Pattern>,
}

impl PunctConfig {
    /// One pattern per line, `#` comments. Bad patterns fail here, never at match time.
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut patterns = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let pattern = Pattern::new(line).map_err(|err| IngestError::InvalidPattern {
                line: idx + 1,
                pattern: line.to_string(),
                reason: err.msg.to_string(),
            })?;
            patterns.push(pattern);
        }
        Ok(PunctConfig { patterns })
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn empty() -> Self {
        PunctConfig::default()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(Pattern::as_str)
    }

    pub fn is_punct(&self, lextype: &str) -> bool {
        self.patterns.iter().any(|p| p.matches(lextype))
    }
}

/// The shipped default list.
pub fn default_punct_config() -> PunctConfig {
    PunctConfig::parse(DEFAULT_PATTERNS).expect("shipped punctuation patterns are valid")
}

pub fn classify_punctuation(lextype: &str, config: &PunctConfig) -> bool {
    config.is_punct(lextype)
}
