use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;
use typediv::compare::CompareError;
use typediv::distribution::DistributionError;
use typediv::diversity::DiversityError;
use typediv::ingest::IngestError;
use typediv::parsability::ParsabilityError;
use typediv_harness::HarnessError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    /// A library error raised while processing one corpus.
    #[error("{corpus}: {message}")]
    Corpus {
        corpus: String,
        kind: &'static str,
        message: String,
    },
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{failed} of {total} generation task(s) failed; see {errors}")]
    Generation {
        failed: usize,
        total: usize,
        errors: PathBuf,
    },
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn config(path: &Path, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Io { .. } => "io",
            CliError::Corpus { kind, .. } => kind,
            CliError::Harness(err) => err.kind(),
            CliError::Generation { .. } => "generation_failed",
        }
    }

    /// Single-line JSON for standard error.
    pub fn to_json_line(&self) -> String {
        let mut value = json!({"error": self.kind(), "message": self.to_string()});
        if let CliError::Corpus { corpus, .. } = self {
            value["corpus"] = json!(corpus);
        }
        value.to_string()
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Attach the corpus name to a library error.
pub trait InCorpus<T> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError>;
}

fn corpus_error(corpus: &str, kind: &'static str, err: impl std::fmt::Display) -> CliError {
    CliError::Corpus {
        corpus: corpus.to_string(),
        kind,
        message: err.to_string(),
    }
}

fn distribution_kind(err: &DistributionError) -> &'static str {
    match err {
        DistributionError::FilterOnConstructions => "filter_on_constructions",
        DistributionError::EmptyDistribution => "empty_distribution",
        DistributionError::CategoryMismatch(..) | DistributionError::FilterMismatch(..) => {
            "distribution_mismatch"
        }
        DistributionError::Malformed(_) => "malformed_distribution",
    }
}

impl<T> InCorpus<T> for Result<T, IngestError> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError> {
        self.map_err(|err| {
            let kind = match &err {
                IngestError::Io { .. } => "io",
                IngestError::MalformedRecord { .. } => "malformed_record",
                IngestError::DuplicateId(_) => "duplicate_id",
                IngestError::InvalidPattern { .. } => "invalid_pattern",
                IngestError::EmptyCorpus(_) => "empty_corpus",
            };
            corpus_error(corpus, kind, err)
        })
    }
}

impl<T> InCorpus<T> for Result<T, DistributionError> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError> {
        self.map_err(|err| corpus_error(corpus, distribution_kind(&err), err))
    }
}

impl<T> InCorpus<T> for Result<T, DiversityError> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError> {
        self.map_err(|err| {
            let kind = match &err {
                DiversityError::Distribution(inner) => distribution_kind(inner),
                DiversityError::BadTargetN { .. } => "bad_target_n",
                DiversityError::BadIterations(_) => "bad_iterations",
            };
            corpus_error(corpus, kind, err)
        })
    }
}

impl<T> InCorpus<T> for Result<T, CompareError> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError> {
        self.map_err(|err| {
            let kind = match &err {
                CompareError::Distribution(inner) => distribution_kind(inner),
                CompareError::BadTopK => "bad_top_k",
                CompareError::UnknownLabel(_) => "unknown_label",
            };
            corpus_error(corpus, kind, err)
        })
    }
}

impl<T> InCorpus<T> for Result<T, ParsabilityError> {
    fn in_corpus(self, corpus: &str) -> Result<T, CliError> {
        self.map_err(|err| corpus_error(corpus, "empty_corpus", err))
    }
}
