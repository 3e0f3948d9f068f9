//! The JSON run configuration, validated before any command runs.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use typediv::diversity::{Metric, Resampling, MAX_ITERATIONS};
use typediv::{Category, PunctFilter, SourceKind, Statistic};
use typediv_harness::archive::DEFAULT_ARCHIVE_ENDPOINT;
use typediv_harness::GenerationConfig;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatSpec {
    Jsonl,
    Derivations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub name: String,
    pub path: PathBuf,
    pub format: FormatSpec,
    pub kind: SourceKind,
    pub year: String,
    /// Required for derivation exports.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    /// Passed through to the parsability tables.
    #[serde(default)]
    pub ram_limit_gb: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub category: Category,
    #[serde(default)]
    pub filter: PunctFilter,
}

/// A fixed subsample size, or `"min_n"` for the smallest corpus total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetN {
    Fixed(u64),
    Rule(String),
}

impl Default for TargetN {
    fn default() -> Self {
        TargetN::Rule("min_n".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub iterations: u32,
    pub target_n: TargetN,
    pub resampling: Resampling,
    pub seed: u64,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection {
            iterations: MAX_ITERATIONS,
            target_n: TargetN::default(),
            resampling: Resampling::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Group {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupComparison {
    pub first: Group,
    pub second: Group,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub pairs: Vec<[String; 2]>,
    pub groups: Vec<GroupComparison>,
    pub top_k: usize,
    pub examples_per_type: usize,
    pub stat: Statistic,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            pairs: Vec::new(),
            groups: Vec::new(),
            top_k: 10,
            examples_per_type: 1,
            stat: Statistic::Jsd,
        }
    }
}

impl CompareSection {
    /// Pairs first, then groups, as group comparisons.
    pub fn all(&self) -> Vec<GroupComparison> {
        let single = |name: &String| Group {
            name: name.clone(),
            members: vec![name.clone()],
        };
        self.pairs
            .iter()
            .map(|[a, b]| GroupComparison {
                first: single(a),
                second: single(b),
            })
            .chain(self.groups.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchiveSection {
    pub endpoint: String,
    pub api_key_env: String,
    /// `YYYY-MM` or `YYYY-MM..YYYY-MM`.
    pub months: Option<String>,
}

impl Default for ArchiveSection {
    fn default() -> Self {
        ArchiveSection {
            endpoint: DEFAULT_ARCHIVE_ENDPOINT.into(),
            api_key_env: "NYT_API_KEY".into(),
            months: None,
        }
    }
}

fn default_analyses() -> Vec<Analysis> {
    vec![
        Analysis { category: Category::Construction, filter: PunctFilter::All },
        Analysis { category: Category::Lextype, filter: PunctFilter::All },
    ]
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Shannon, Metric::Simpson]
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub corpora: Vec<CorpusSpec>,
    #[serde(default = "default_analyses")]
    pub analyses: Vec<Analysis>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub include_unknown: bool,
    /// Punctuation pattern file; the built-in list when absent.
    #[serde(default)]
    pub punct_patterns: Option<PathBuf>,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    #[serde(default)]
    pub comparisons: CompareSection,
    #[serde(default)]
    pub generation: GenerationConfig,
    #[serde(default)]
    pub archive: ArchiveSection,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config deserializes")
    }
}

impl RunConfig {
    /// Parse and resolve relative paths against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::config(path, e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for corpus in &mut config.corpora {
            resolve(&mut corpus.path);
            if let Some(lexicon) = &mut corpus.lexicon {
                resolve(lexicon);
            }
        }
        if let Some(patterns) = &mut config.punct_patterns {
            resolve(patterns);
        }
        resolve(&mut config.output_dir);
        config.validate(path)?;
        Ok(config)
    }

    /// Structural checks that need no corpus data.
    pub fn validate(&self, origin: &Path) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::config(origin, msg));
        let mut names = HashSet::new();
        for corpus in &self.corpora {
            if corpus.name.trim().is_empty() {
                return bad("corpus name must not be empty".into());
            }
            if !names.insert(corpus.name.as_str()) {
                return bad(format!("duplicate corpus name {:?}", corpus.name));
            }
            if !corpus.path.exists() {
                return bad(format!("{}: corpus file not found", corpus.path.display()));
            }
            match (&corpus.format, &corpus.lexicon) {
                (FormatSpec::Derivations, None) => {
                    return bad(format!("{}: derivation corpora need a lexicon", corpus.name))
                }
                (_, Some(lexicon)) if !lexicon.exists() => {
                    return bad(format!("{}: lexicon file not found", lexicon.display()))
                }
                _ => {}
            }
        }
        if let Some(patterns) = &self.punct_patterns {
            if !patterns.exists() {
                return bad(format!("{}: pattern file not found", patterns.display()));
            }
        }
        if let TargetN::Rule(rule) = &self.bootstrap.target_n {
            if rule != "min_n" {
                return bad(format!("bootstrap.target_n must be a number or \"min_n\", got {rule:?}"));
            }
        }
        if self.bootstrap.iterations == 0 || self.bootstrap.iterations > MAX_ITERATIONS {
            return bad(format!("bootstrap.iterations must be in 1..={MAX_ITERATIONS}"));
        }
        for cmp in self.comparisons.all() {
            for member in cmp.first.members.iter().chain(&cmp.second.members) {
                if !names.contains(member.as_str()) {
                    return bad(format!("comparison names unknown corpus {member:?}"));
                }
            }
            if cmp.first.members.is_empty() || cmp.second.members.is_empty() {
                return bad("comparison groups must not be empty".into());
            }
            if cmp.first.members.iter().any(|m| cmp.second.members.contains(m)) {
                return bad(format!(
                    "{} and {} share a corpus",
                    cmp.first.name, cmp.second.name
                ));
            }
        }
        Ok(())
    }

    pub fn corpus(&self, name: &str) -> Option<&CorpusSpec> {
        self.corpora.iter().find(|c| c.name == name)
    }
}
