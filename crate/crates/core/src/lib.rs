//! Construction and lexical-type diversity analysis over parsed corpora.
//!
//! Corpora are loaded as item records ([`ingest`]), pooled into label
//! frequency tables ([`distribution`]), and summarized with Shannon and
//! Simpson indices ([`diversity`]), per-type divergence rankings
//! ([`compare`]) and parse-outcome statistics ([`parsability`]).

pub mod compare;
pub mod csvfmt;
pub mod distribution;
pub mod diversity;
mod exec;
pub mod ingest;
pub mod parsability;

pub use compare::{find_examples, jsd, rank_distinctive, ComparisonReport, Statistic, TypeContribution};
pub use distribution::{build_distribution, merge, relative_frequencies, Category, PunctFilter, TypeDistribution};
pub use diversity::{bootstrap_diversity, shannon, simpson, BootstrapParams, DiversityEstimate, Metric, Resampling};
pub use exec::Execution;
pub use ingest::{load_corpus, Corpus, CorpusFormat, CorpusMeta, ItemRecord, SourceKind};
pub use parsability::{aggregate_stats, binned_costs, LengthBinTable, ParseStats};
