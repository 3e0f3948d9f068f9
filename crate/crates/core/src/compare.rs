//! Ranking the types that separate two distributions.
//!
//! The default statistic is the Jensen-Shannon divergence (nats, mixture
//! weight 1/2), which splits exactly into one non-negative term per label:
//!
//! ```text
//! c(t) = 1/2 p1(t) ln(p1(t)/m(t)) + 1/2 p2(t) ln(p2(t)/m(t)),  m = (p1 + p2)/2
//! ```
//!
//! with `0 ln(0/x) = 0`. The total is computed separately as
//! `H(m) - (H(p1) + H(p2))/2`, so the per-label sum is a real cross-check.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvfmt::{csv_row, fmt_f64};
use crate::distribution::{Category, DistributionError, PunctFilter, TypeDistribution};
use crate::ingest::{Corpus, ItemRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("top_k must be at least 1")]
    BadTopK,
    #[error("label {0:?} does not occur in the corpus")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Per-type Jensen-Shannon contribution.
    #[default]
    Jsd,
    /// Half the absolute difference in relative frequency.
    FreqDelta,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::Jsd => "jsd",
            Statistic::FreqDelta => "freq-delta",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::First => "first",
            Side::Second => "second",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeContribution {
    pub label: String,
    pub contribution: f64,
    pub preferred_by: Side,
    pub p_first: f64,
    pub p_second: f64,
    /// Equal relative frequency on both sides; `preferred_by` is then `First`.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub first_name: String,
    pub second_name: String,
    pub category: Category,
    pub filter: PunctFilter,
    pub statistic: Statistic,
    /// Divergence over the whole union support (not just the retained rows).
    pub total: f64,
    pub ranked: Vec<TypeContribution>,
}

fn check_compatible(a: &TypeDistribution, b: &TypeDistribution) -> Result<(), DistributionError> {
    if a.category() != b.category() {
        return Err(DistributionError::CategoryMismatch(a.category(), b.category()));
    }
    if a.filter() != b.filter() {
        return Err(DistributionError::FilterMismatch(a.filter(), b.filter()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(DistributionError::EmptyDistribution);
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `p ln(p/m)`, zero when `p` is zero.
fn kl_term(p: f64, m: f64) -> f64 {
    if p > 0.0 {
        p * (p / m).ln()
    } else {
        0.0
    }
}

/// Aligned relative frequencies over the union support, in label order.
fn aligned<'a>(
    first: &'a TypeDistribution,
    second: &'a TypeDistribution,
) -> Vec<(&'a str, f64, f64)> {
    let n1 = first.total() as f64;
    let n2 = second.total() as f64;
    let labels: BTreeSet<&str> = first
        .counts()
        .keys()
        .chain(second.counts().keys())
        .map(String::as_str)
        .collect();
    labels
        .into_iter()
        .map(|l| (l, first.count(l) as f64 / n1, second.count(l) as f64 / n2))
        .collect()
}

/// Jensen-Shannon divergence in nats.
pub fn jsd(first: &TypeDistribution, second: &TypeDistribution) -> Result<f64, DistributionError> {
    check_compatible(first, second)?;
    let rows = aligned(first, second);
    let h_mix: f64 = -rows.iter().map(|&(_, p, q)| plogp(0.5 * (p + q))).sum::<f64>();
    let h_first: f64 = -rows.iter().map(|&(_, p, _)| plogp(p)).sum::<f64>();
    let h_second: f64 = -rows.iter().map(|&(_, _, q)| plogp(q)).sum::<f64>();
    Ok((h_mix - 0.5 * (h_first + h_second)).max(0.0))
}

/// One label's share of the chosen statistic.
pub fn contribution(statistic: Statistic, p_first: f64, p_second: f64) -> f64 {
    match statistic {
        Statistic::Jsd => {
            let m = 0.5 * (p_first + p_second);
            0.5 * kl_term(p_first, m) + 0.5 * kl_term(p_second, m)
        }
        Statistic::FreqDelta => 0.5 * (p_first - p_second).abs(),
    }
}

fn total_variation(first: &TypeDistribution, second: &TypeDistribution) -> f64 {
    0.5 * aligned(first, second)
        .iter()
        .map(|&(_, p, q)| (p - q).abs())
        .sum::<f64>()
}

/// Rank every label of the union support by contribution and keep `top_k`.
pub fn rank_distinctive(
    first: &TypeDistribution,
    second: &TypeDistribution,
    top_k: usize,
    statistic: Statistic,
) -> Result<ComparisonReport, CompareError> {
    if top_k == 0 {
        return Err(CompareError::BadTopK);
    }
    check_compatible(first, second)?;
    let total = match statistic {
        Statistic::Jsd => jsd(first, second)?,
        Statistic::FreqDelta => total_variation(first, second),
    };
    let mut ranked: Vec<TypeContribution> = aligned(first, second)
        .into_iter()
        .map(|(label, p, q)| TypeContribution {
            label: label.to_string(),
            contribution: contribution(statistic, p, q),
            preferred_by: if q > p { Side::Second } else { Side::First },
            p_first: p,
            p_second: q,
            tie: p == q,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.contribution
            .total_cmp(&a.contribution)
            .then_with(|| a.label.cmp(&b.label))
    });
    ranked.truncate(top_k);
    Ok(ComparisonReport {
        first_name: first.source().join("+"),
        second_name: second.source().join("+"),
        category: first.category(),
        filter: first.filter(),
        statistic,
        total,
        ranked,
    })
}

/// Up to `k` items whose labels contain `label`, shortest first, then by id.
pub fn find_examples<'a>(
    corpus: &'a Corpus,
    label: &str,
    category: Category,
    k: usize,
) -> Result<Vec<&'a ItemRecord>, CompareError> {
    if k == 0 {
        return Err(CompareError::BadTopK);
    }
    let mut matches: Vec<&ItemRecord> = corpus
        .items
        .iter()
        .filter(|item| category.labels(item).iter().any(|l| l == label))
        .collect();
    if matches.is_empty() {
        return Err(CompareError::UnknownLabel(label.to_string()));
    }
    matches.sort_by(|a, b| a.token_count.cmp(&b.token_count).then_with(|| a.id.cmp(&b.id)));
    matches.truncate(k);
    Ok(matches)
}

impl ComparisonReport {
    pub fn preferred_name(&self, side: Side) -> &str {
        match side {
            Side::First => &self.first_name,
            Side::Second => &self.second_name,
        }
    }

    /// `rank,label,contribution,preferred_by,p_first,p_second`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,label,contribution,preferred_by,p_first,p_second\n");
        for (i, row) in self.ranked.iter().enumerate() {
            out.push_str(&csv_row([
                (i + 1).to_string(),
                row.label.clone(),
                fmt_f64(row.contribution),
                row.preferred_by.as_str().to_string(),
                fmt_f64(row.p_first),
                fmt_f64(row.p_second),
            ]));
        }
        out
    }

    /// Plain-text table: type, preferring side, example sentence, and an
    /// empty constituent column. `examples[i]` belongs to `ranked[i]`.
    pub fn render_table(&self, examples: &[Vec<String>]) -> String {
        let header = ["Type", "Preferred by", "Example Sentence", "Constituent"];
        let mut rows: Vec<[String; 4]> = Vec::new();
        for (i, row) in self.ranked.iter().enumerate() {
            let mut preferred = self.preferred_name(row.preferred_by).to_string();
            if row.tie {
                preferred.push_str(" (tie)");
            }
            let sentences = examples.get(i).map(Vec::as_slice).unwrap_or(&[]);
            let first = sentences.first().cloned().unwrap_or_default();
            rows.push([row.label.clone(), preferred, first, String::new()]);
            for extra in sentences.iter().skip(1) {
                rows.push([String::new(), String::new(), extra.clone(), String::new()]);
            }
        }
        let mut widths = header.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 4]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str(" | ");
                }
                s.push_str(cell);
                s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
            }
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = format!(
            "{} vs {} ({}, {}, {}; total {})\n",
            self.first_name,
            self.second_name,
            self.category,
            self.filter,
            self.statistic,
            fmt_f64(self.total)
        );
        out.push_str(&line(header));
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &rows {
            out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
        }
        out
    }
}
