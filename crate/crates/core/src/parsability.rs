//! Parse-outcome aggregates per corpus and length-binned parse costs.
//!
//! Conventions:
//! - items over a resource limit are unparsed, counted in `over_limit_pct`,
//!   and their costs are left out of every mean;
//! - `fragment_pct` is relative to parsed items, every other percentage to
//!   all items;
//! - cost means run over parsed items that carry the field, and are `None`
//!   when no item does.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvfmt::{csv_row, fmt_f64};
use crate::ingest::{Corpus, ItemRecord};

/// Sentences at or below this many tokens are "short".
pub const SHORT_MAX_TOKENS: u32 = 15;

/// Inclusive token ranges of the cost bins.
pub const LENGTH_BINS: [(u32, u32); 4] = [(31, 35), (36, 40), (41, 45), (46, 50)];

/// Printed in place of a missing value in text tables.
pub const MISSING: &str = "—";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParsabilityError {
    #[error("corpus {0:?} has no items")]
    EmptyCorpus(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseStats {
    pub items: usize,
    pub parsed_pct: f64,
    pub mean_tokens: f64,
    pub short_pct: f64,
    pub fragment_pct: Option<f64>,
    pub mean_cpu: Option<f64>,
    pub mean_mem: Option<f64>,
    pub over_limit_pct: f64,
    pub ram_limit_gb: Option<f64>,
}

/// Mergeable sums and counts behind [`ParseStats`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsAccumulator {
    items: usize,
    parsed: usize,
    tokens: u64,
    short: usize,
    fragments: usize,
    over_limit: usize,
    cpu_sum: f64,
    cpu_n: usize,
    mem_sum: f64,
    mem_n: usize,
}

impl StatsAccumulator {
    pub fn push(&mut self, item: &ItemRecord) {
        self.items += 1;
        self.tokens += item.token_count as u64;
        if item.token_count <= SHORT_MAX_TOKENS {
            self.short += 1;
        }
        if item.exceeded_limit {
            self.over_limit += 1;
        }
        if !item.is_parsed() {
            return;
        }
        self.parsed += 1;
        if item.fragment {
            self.fragments += 1;
        }
        if let Some(cpu) = item.cpu_seconds {
            self.cpu_sum += cpu;
            self.cpu_n += 1;
        }
        if let Some(mem) = item.memory_gb {
            self.mem_sum += mem;
            self.mem_n += 1;
        }
    }

    pub fn merge(mut self, other: &StatsAccumulator) -> Self {
        self.items += other.items;
        self.parsed += other.parsed;
        self.tokens += other.tokens;
        self.short += other.short;
        self.fragments += other.fragments;
        self.over_limit += other.over_limit;
        self.cpu_sum += other.cpu_sum;
        self.cpu_n += other.cpu_n;
        self.mem_sum += other.mem_sum;
        self.mem_n += other.mem_n;
        self
    }

    pub fn finish(&self) -> Option<ParseStats> {
        if self.items == 0 {
            return None;
        }
        let items = self.items as f64;
        let pct = |n: usize| 100.0 * n as f64 / items;
        let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
        Some(ParseStats {
            items: self.items,
            parsed_pct: pct(self.parsed),
            mean_tokens: self.tokens as f64 / items,
            short_pct: pct(self.short),
            fragment_pct: (self.parsed > 0)
                .then(|| 100.0 * self.fragments as f64 / self.parsed as f64),
            mean_cpu: mean(self.cpu_sum, self.cpu_n),
            mean_mem: mean(self.mem_sum, self.mem_n),
            over_limit_pct: pct(self.over_limit),
            ram_limit_gb: None,
        })
    }
}

fn accumulate<T: Default + Clone + Send, F>(items: &[ItemRecord], push: F, merge: fn(T, &T) -> T) -> T
where
    F: Fn(&mut T, &ItemRecord) + Sync,
{
    let chunk = |chunk: &[ItemRecord]| {
        let mut acc = T::default();
        for item in chunk {
            push(&mut acc, item);
        }
        acc
    };
    // fixed chunking and an in-order fold keep float sums independent of threads
    #[cfg(feature = "parallel")]
    let partials: Vec<T> = {
        use rayon::prelude::*;
        items.par_chunks(4096).map(chunk).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<T> = items.chunks(4096).map(chunk).collect();
    partials.iter().fold(T::default(), merge)
}

pub fn aggregate_stats(corpus: &Corpus) -> Result<ParseStats, ParsabilityError> {
    accumulate(&corpus.items, StatsAccumulator::push, StatsAccumulator::merge)
        .finish()
        .ok_or_else(|| ParsabilityError::EmptyCorpus(corpus.name.clone()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct BinAcc {
    count: usize,
    cpu_sum: f64,
    cpu_n: usize,
    mem_sum: f64,
    mem_n: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct BinsAccumulator([BinAcc; 4]);

impl BinsAccumulator {
    fn push(&mut self, item: &ItemRecord) {
        if !item.is_parsed() {
            return;
        }
        let Some(bin) = length_bin(item.token_count) else {
            return;
        };
        let acc = &mut self.0[bin];
        acc.count += 1;
        if let Some(cpu) = item.cpu_seconds {
            acc.cpu_sum += cpu;
            acc.cpu_n += 1;
        }
        if let Some(mem) = item.memory_gb {
            acc.mem_sum += mem;
            acc.mem_n += 1;
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            a.count += b.count;
            a.cpu_sum += b.cpu_sum;
            a.cpu_n += b.cpu_n;
            a.mem_sum += b.mem_sum;
            a.mem_n += b.mem_n;
        }
        self
    }
}

/// Index into [`LENGTH_BINS`], or `None` outside 31..=50 tokens.
pub fn length_bin(token_count: u32) -> Option<usize> {
    LENGTH_BINS
        .iter()
        .position(|&(lo, hi)| (lo..=hi).contains(&token_count))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBinTable {
    pub counts: [usize; 4],
    pub mean_cpu: [Option<f64>; 4],
    pub mean_mem: [Option<f64>; 4],
}

pub fn binned_costs(corpus: &Corpus) -> Result<LengthBinTable, ParsabilityError> {
    if corpus.items.is_empty() {
        return Err(ParsabilityError::EmptyCorpus(corpus.name.clone()));
    }
    let acc = accumulate(&corpus.items, BinsAccumulator::push, BinsAccumulator::merge);
    let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
    Ok(LengthBinTable {
        counts: acc.0.map(|b| b.count),
        mean_cpu: acc.0.map(|b| mean(b.cpu_sum, b.cpu_n)),
        mean_mem: acc.0.map(|b| mean(b.mem_sum, b.mem_n)),
    })
}

fn fixed(value: Option<f64>, decimals: usize) -> String {
    match value {
        Some(v) => format!("{v:.decimals$}"),
        None => MISSING.to_string(),
    }
}

fn opt_csv(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

/// Space-aligned text table; first column left-aligned, the rest right-aligned.
fn render_aligned(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; columns];
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, (cell, &w)) in row.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.push_str("  ");
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn strs(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

/// One text row per corpus at the customary printed precision.
pub fn render_stats_table(rows: &[(&str, &ParseStats)]) -> String {
    let mut table = vec![
        strs(&["Profile", "Items", "Parsed", "Length", "Short", "Frgmt", "Time", "Space", ">Limit"]),
        strs(&["", "", "%", "toks/S", "%", "%", "sec/S", "Gb/S", "%"]),
    ];
    for (name, s) in rows {
        table.push(vec![
            name.to_string(),
            s.items.to_string(),
            fixed(Some(s.parsed_pct), 1),
            fixed(Some(s.mean_tokens), 2),
            fixed(Some(s.short_pct), 0),
            fixed(s.fragment_pct, 0),
            fixed(s.mean_cpu, 1),
            fixed(s.mean_mem, 1),
            fixed(Some(s.over_limit_pct), 1),
        ]);
    }
    render_aligned(&table)
}

pub fn stats_csv(rows: &[(&str, &ParseStats)]) -> String {
    let mut out = String::from(
        "profile,items,parsed_pct,mean_tokens,short_pct,fragment_pct,mean_cpu,mean_mem,over_limit_pct,ram_limit_gb\n",
    );
    for (name, s) in rows {
        out.push_str(&csv_row([
            name.to_string(),
            s.items.to_string(),
            fmt_f64(s.parsed_pct),
            fmt_f64(s.mean_tokens),
            fmt_f64(s.short_pct),
            opt_csv(s.fragment_pct),
            opt_csv(s.mean_cpu),
            opt_csv(s.mean_mem),
            fmt_f64(s.over_limit_pct),
            opt_csv(s.ram_limit_gb),
        ]));
    }
    out
}

fn bin_name(bin: (u32, u32)) -> String {
    format!("{}-{}", bin.0, bin.1)
}

/// Time in whole CPU-seconds and space to one decimal, per bin.
pub fn render_bins_table(rows: &[(&str, &LengthBinTable)]) -> String {
    let mut group = strs(&["Profile", "Time", "", "", "", "Space", "", "", ""]);
    group[1] = "Time (CPU-seconds/sent)".into();
    group[5] = "Space (Gbytes/sent)".into();
    let mut bins = vec!["(length in tokens)".to_string()];
    bins.extend(LENGTH_BINS.iter().map(|&b| bin_name(b)));
    bins.extend(LENGTH_BINS.iter().map(|&b| bin_name(b)));
    let mut table = vec![bins];
    for (name, t) in rows {
        let mut row = vec![name.to_string()];
        row.extend(t.mean_cpu.iter().map(|&v| fixed(v, 0)));
        row.extend(t.mean_mem.iter().map(|&v| fixed(v, 1)));
        table.push(row);
    }
    // the group header spans columns, so it is not width-aligned
    let mut out = format!("{}: {} | {}\n", group[0], group[1], group[5]);
    out.push_str(&render_aligned(&table));
    out
}

pub fn bins_csv(rows: &[(&str, &LengthBinTable)]) -> String {
    let mut header = vec!["profile".to_string()];
    for prefix in ["cpu", "mem", "n"] {
        for (lo, hi) in LENGTH_BINS {
            header.push(format!("{prefix}_{lo}_{hi}"));
        }
    }
    let mut out = csv_row(&header);
    for (name, t) in rows {
        let mut row = vec![name.to_string()];
        row.extend(t.mean_cpu.iter().map(|&v| opt_csv(v)));
        row.extend(t.mean_mem.iter().map(|&v| opt_csv(v)));
        row.extend(t.counts.iter().map(|c| c.to_string()));
        out.push_str(&csv_row(&row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SourceKind;

    fn item(id: usize, tokens: u32, parsed: bool, cpu: Option<f64>) -> ItemRecord {
        ItemRecord {
            id: id.to_string(),
            sentence: "x".into(),
            token_count: tokens,
            parsed,
            fragment: false,
            exceeded_limit: false,
            cpu_seconds: cpu,
            memory_gb: cpu.map(|c| c / 10.0),
            construction_labels: vec![],
            lextype_labels: vec![],
        }
    }

    fn corpus(items: Vec<ItemRecord>) -> Corpus {
        Corpus {
            name: "c".into(),
            source_kind: SourceKind::Human,
            year_tag: "2023".into(),
            items,
        }
    }

    #[test]
    fn parsed_percentage() {
        let items = (0..1000).map(|i| item(i, 20, i < 934, Some(1.0))).collect();
        let stats = aggregate_stats(&corpus(items)).unwrap();
        assert_eq!(format!("{:.1}", stats.parsed_pct), "93.4");
        assert!((stats.parsed_pct - 93.4).abs() < 1e-9);
    }

    #[test]
    fn all_short() {
        let items = (0..10).map(|i| item(i, 15, true, None)).collect();
        let stats = aggregate_stats(&corpus(items)).unwrap();
        assert_eq!(stats.short_pct, 100.0);
        assert_eq!(stats.mean_cpu, None);
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(
            aggregate_stats(&corpus(vec![])),
            Err(ParsabilityError::EmptyCorpus("c".into()))
        );
        assert!(binned_costs(&corpus(vec![])).is_err());
    }

    #[test]
    fn over_limit_excluded_from_costs() {
        let mut over = item(2, 20, false, Some(100.0));
        over.exceeded_limit = true;
        let stats = aggregate_stats(&corpus(vec![item(1, 20, true, Some(2.0)), over])).unwrap();
        assert_eq!(stats.mean_cpu, Some(2.0));
        assert_eq!(stats.over_limit_pct, 50.0);
        assert_eq!(stats.parsed_pct, 50.0);
    }

    #[test]
    fn bin_membership() {
        assert_eq!(length_bin(33), Some(0));
        assert_eq!(length_bin(30), None);
        assert_eq!(length_bin(31), Some(0));
        assert_eq!(length_bin(35), Some(0));
        assert_eq!(length_bin(36), Some(1));
        assert_eq!(length_bin(50), Some(3));
        assert_eq!(length_bin(51), None);
    }

    #[test]
    fn bin_means() {
        let table = binned_costs(&corpus(vec![
            item(1, 33, true, Some(10.0)),
            item(2, 34, true, Some(14.0)),
            item(3, 30, true, Some(99.0)),
            item(4, 47, false, None),
        ]))
        .unwrap();
        assert_eq!(table.counts, [2, 0, 0, 0]);
        assert_eq!(table.mean_cpu[0], Some(12.0));
        assert_eq!(table.mean_cpu[1], None);
    }

    #[test]
    fn missing_costs_render_as_dash() {
        let stats = aggregate_stats(&corpus(vec![item(1, 10, true, None)])).unwrap();
        let text = render_stats_table(&[("c", &stats)]);
        let row = text.lines().nth(2).unwrap();
        assert!(row.ends_with("0      —      —     0.0"), "{row:?}");
        let csv = stats_csv(&[("c", &stats)]);
        assert!(csv.ends_with("c,1,100.000000,10.000000,100.000000,0.000000,,,0.000000,\n"));
    }
}
