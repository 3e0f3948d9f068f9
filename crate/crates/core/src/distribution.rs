//! Frequency tables over construction or lexical-type labels.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvfmt::csv_field;
use crate::ingest::{Corpus, ItemRecord, PunctConfig, UNKNOWN_LEXTYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Construction,
    Lextype,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Construction => "construction",
            Category::Lextype => "lextype",
        }
    }

    pub fn labels(self, item: &ItemRecord) -> &[String] {
        match self {
            Category::Construction => &item.construction_labels,
            Category::Lextype => &item.lextype_labels,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctFilter {
    #[default]
    All,
    PunctOnly,
    NoPunct,
}

impl PunctFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            PunctFilter::All => "all",
            PunctFilter::PunctOnly => "punct_only",
            PunctFilter::NoPunct => "no_punct",
        }
    }

    fn keeps(self, label: &str, punct: &PunctConfig) -> bool {
        match self {
            PunctFilter::All => true,
            PunctFilter::PunctOnly => punct.is_punct(label),
            PunctFilter::NoPunct => !punct.is_punct(label),
        }
    }
}

impl fmt::Display for PunctFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("punctuation filters apply to lexical types only")]
    FilterOnConstructions,
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("category mismatch: {0} vs {1}")]
    CategoryMismatch(Category, Category),
    #[error("filter mismatch: {0} vs {1}")]
    FilterMismatch(PunctFilter, PunctFilter),
    #[error("malformed distribution csv: {0}")]
    Malformed(String),
}

/// Label counts for one corpus slice. Zero counts are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDistribution {
    category: Category,
    filter: PunctFilter,
    counts: BTreeMap<String, u64>,
    source: Vec<String>,
}

impl TypeDistribution {
    /// A distribution with no tokens; the identity for [`merge`].
    pub fn empty(category: Category, filter: PunctFilter) -> Self {
        TypeDistribution {
            category,
            filter,
            counts: BTreeMap::new(),
            source: Vec::new(),
        }
    }

    pub fn from_counts<I, L>(category: Category, filter: PunctFilter, source: &str, counts: I) -> Self
    where
        I: IntoIterator<Item = (L, u64)>,
        L: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (label, count) in counts {
            if count > 0 {
                *map.entry(label.into()).or_insert(0) += count;
            }
        }
        TypeDistribution {
            category,
            filter,
            counts: map,
            source: vec![source.to_string()],
        }
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn filter(&self) -> PunctFilter {
        self.filter
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    /// N: total tokens.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// S: distinct labels.
    pub fn richness(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Counts in label order.
    pub fn count_vec(&self) -> Vec<u64> {
        self.counts.values().copied().collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# category={} filter={} N={} S={} source={}\nlabel,count\n",
            self.category,
            self.filter,
            self.total(),
            self.richness(),
            self.source.join("+")
        );
        for (label, count) in &self.counts {
            out.push_str(&csv_field(label));
            out.push(',');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, DistributionError> {
        let malformed = |msg: &str| DistributionError::Malformed(msg.to_string());
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| malformed("missing header comment"))?;
        let mut category = None;
        let mut filter = None;
        let mut source = Vec::new();
        for field in header.split(' ') {
            match field.split_once('=') {
                Some(("category", v)) => {
                    category = serde_json::from_value(v.into()).ok();
                }
                Some(("filter", v)) => filter = serde_json::from_value(v.into()).ok(),
                Some(("source", v)) if !v.is_empty() => {
                    source = v.split('+').map(str::to_string).collect();
                }
                _ => {}
            }
        }
        let (Some(category), Some(filter)) = (category, filter) else {
            return Err(malformed("header lacks category or filter"));
        };
        if lines.next() != Some("label,count") {
            return Err(malformed("missing column header"));
        }
        let mut counts = BTreeMap::new();
        for row in csv_rows(lines) {
            let (label, count) = row.map_err(|e| malformed(&e))?;
            let count: u64 = count.parse().map_err(|_| malformed("bad count"))?;
            if count > 0 {
                counts.insert(label, count);
            }
        }
        Ok(TypeDistribution {
            category,
            filter,
            counts,
            source,
        })
    }
}

/// Minimal reader for the two-column rows written by [`TypeDistribution::to_csv`].
fn csv_rows<'a>(
    lines: impl Iterator<Item = &'a str> + 'a,
) -> impl Iterator<Item = Result<(String, String), String>> + 'a {
    let mut lines = lines.peekable();
    std::iter::from_fn(move || {
        let first = lines.next()?;
        if !first.starts_with('"') {
            return Some(
                first
                    .rsplit_once(',')
                    .map(|(l, c)| (l.to_string(), c.to_string()))
                    .ok_or_else(|| format!("bad row {first:?}")),
            );
        }
        // quoted label, possibly spanning lines
        let mut buf = first.to_string();
        loop {
            if let Some((label, count)) = split_quoted(&buf) {
                return Some(Ok((label, count)));
            }
            match lines.next() {
                Some(next) => {
                    buf.push('\n');
                    buf.push_str(next);
                }
                None => return Some(Err("unterminated quoted label".into())),
            }
        }
    })
}

fn split_quoted(row: &str) -> Option<(String, String)> {
    let mut label = String::new();
    let mut chars = row[1..].char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '"' {
            if matches!(chars.peek(), Some((_, '"'))) {
                chars.next();
                label.push('"');
            } else {
                let rest = &row[1 + i + 1..];
                return rest.strip_prefix(',').map(|c| (label, c.to_string()));
            }
        } else {
            label.push(c);
        }
    }
    None
}

fn count_items<'a>(
    items: impl Iterator<Item = &'a ItemRecord>,
    category: Category,
    filter: PunctFilter,
    punct: &PunctConfig,
    include_unknown: bool,
) -> HashMap<&'a str, u64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for item in items {
        for label in category.labels(item) {
            if !include_unknown && label == UNKNOWN_LEXTYPE {
                continue;
            }
            if filter.keeps(label, punct) {
                *counts.entry(label.as_str()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Pool the labels of every parsed item in `corpus`.
///
/// The reserved unknown lexical type is dropped unless `include_unknown`.
pub fn build_distribution(
    corpus: &Corpus,
    category: Category,
    filter: PunctFilter,
    punct: &PunctConfig,
    include_unknown: bool,
) -> Result<TypeDistribution, DistributionError> {
    if category == Category::Construction && filter != PunctFilter::All {
        return Err(DistributionError::FilterOnConstructions);
    }

    #[cfg(feature = "parallel")]
    let counts = {
        use rayon::prelude::*;
        corpus
            .items
            .par_chunks(1024)
            .map(|chunk| {
                count_items(
                    chunk.iter().filter(|i| i.is_parsed()),
                    category,
                    filter,
                    punct,
                    include_unknown,
                )
            })
            .reduce(HashMap::new, |mut acc, part| {
                for (label, n) in part {
                    *acc.entry(label).or_insert(0) += n;
                }
                acc
            })
    };
    #[cfg(not(feature = "parallel"))]
    let counts = count_items(corpus.parsed_items(), category, filter, punct, include_unknown);

    if counts.is_empty() {
        return Err(DistributionError::EmptyDistribution);
    }
    Ok(TypeDistribution::from_counts(
        category,
        filter,
        &corpus.name,
        counts,
    ))
}

/// Pointwise sum of two distributions of the same kind.
pub fn merge(
    first: &TypeDistribution,
    second: &TypeDistribution,
) -> Result<TypeDistribution, DistributionError> {
    if first.category != second.category {
        return Err(DistributionError::CategoryMismatch(
            first.category,
            second.category,
        ));
    }
    if first.filter != second.filter {
        return Err(DistributionError::FilterMismatch(first.filter, second.filter));
    }
    let mut counts = first.counts.clone();
    for (label, n) in &second.counts {
        *counts.entry(label.clone()).or_insert(0) += n;
    }
    let mut source = first.source.clone();
    source.extend(second.source.iter().cloned());
    Ok(TypeDistribution {
        category: first.category,
        filter: first.filter,
        counts,
        source,
    })
}

/// Merge a non-empty group of distributions left to right.
pub fn merge_all<'a>(
    dists: impl IntoIterator<Item = &'a TypeDistribution>,
) -> Result<TypeDistribution, DistributionError> {
    let mut iter = dists.into_iter();
    let first = iter.next().ok_or(DistributionError::EmptyDistribution)?;
    iter.try_fold(first.clone(), |acc, d| merge(&acc, d))
}

pub fn relative_frequencies(
    dist: &TypeDistribution,
) -> Result<BTreeMap<String, f64>, DistributionError> {
    let total = dist.total();
    if total == 0 {
        return Err(DistributionError::EmptyDistribution);
    }
    let n = total as f64;
    Ok(dist
        .counts
        .iter()
        .map(|(label, &c)| (label.clone(), c as f64 / n))
        .collect())
}
