pub mod compare;
pub mod diversity;
pub mod generate;
pub mod ingest;
pub mod parsability;

use std::path::PathBuf;

use rayon::prelude::*;
use typediv::ingest::{default_punct_config, LexiconMap, PunctConfig};
use typediv::{build_distribution, load_corpus, Corpus, CorpusFormat, CorpusMeta, TypeDistribution};

use crate::config::{Analysis, CorpusSpec, FormatSpec, RunConfig};
use crate::error::{CliError, InCorpus};
use crate::output::write_atomic;

/// Validated configuration plus the resolved output directory.
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub punct: PunctConfig,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let punct = match &config.punct_patterns {
            Some(path) => PunctConfig::load(path).in_corpus("<punct patterns>")?,
            None => default_punct_config(),
        };
        Ok(Context {
            out: config.output_dir.clone(),
            config,
            punct,
        })
    }

    /// Record the fully defaulted configuration next to the outputs.
    pub fn write_resolved(&self) -> Result<(), CliError> {
        let mut json = serde_json::to_string_pretty(&self.config).expect("config serializes");
        json.push('\n');
        write_atomic(&self.out, "resolved_config.json", json.as_bytes())?;
        Ok(())
    }

    pub fn require_corpora(&self) -> Result<(), CliError> {
        if self.config.corpora.is_empty() {
            return Err(CliError::Usage("the configuration lists no corpora".into()));
        }
        Ok(())
    }

    /// Every configured corpus, loaded in parallel, in configuration order.
    pub fn load_corpora(&self) -> Result<Vec<Corpus>, CliError> {
        self.require_corpora()?;
        self.config.corpora.par_iter().map(load_one).collect()
    }

    pub fn distribution(&self, corpus: &Corpus, analysis: Analysis) -> Result<TypeDistribution, CliError> {
        build_distribution(
            corpus,
            analysis.category,
            analysis.filter,
            &self.punct,
            self.config.include_unknown,
        )
        .in_corpus(&corpus.name)
    }
}

fn load_one(spec: &CorpusSpec) -> Result<Corpus, CliError> {
    let meta = CorpusMeta::new(spec.name.clone(), spec.kind, spec.year.clone());
    match spec.format {
        FormatSpec::Jsonl => load_corpus(&spec.path, CorpusFormat::Jsonl, &meta),
        FormatSpec::Derivations => {
            let path = spec.lexicon.as_ref().expect("validated: derivations carry a lexicon");
            let lexicon = LexiconMap::load(path).in_corpus(&spec.name)?;
            load_corpus(&spec.path, CorpusFormat::Derivations { lexicon: &lexicon }, &meta)
        }
    }
    .in_corpus(&spec.name)
}

pub fn analysis_stem(analysis: Analysis) -> String {
    format!("{}_{}", analysis.category.as_str(), analysis.filter.as_str())
}
