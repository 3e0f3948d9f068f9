use std::collections::HashMap;
use std::path::PathBuf;

use typediv::compare::{find_examples, CompareError, ComparisonReport, Side};
use typediv::csvfmt::fmt_f64;
use typediv::distribution::merge_all;
use typediv::{rank_distinctive, Corpus, ItemRecord, Statistic, TypeDistribution};

use super::{analysis_stem, Context};
use crate::config::{Analysis, Group, GroupComparison};
use crate::error::{CliError, InCorpus};
use crate::output::{file_stem, write_atomic};

/// A CSV ranking and a text table with example sentences per comparison and
/// analysis. Groups are pooled by summing counts.
pub fn run(ctx: &Context, stat: Option<Statistic>) -> Result<Vec<PathBuf>, CliError> {
    let comparisons = ctx.config.comparisons.all();
    if ctx.config.corpora.len() < 2 {
        return Err(CliError::Usage("compare needs at least two corpora".into()));
    }
    if comparisons.is_empty() {
        return Err(CliError::Usage(
            "compare needs comparisons.pairs or comparisons.groups in the configuration".into(),
        ));
    }
    let stat = stat.unwrap_or(ctx.config.comparisons.stat);
    let corpora = ctx.load_corpora()?;
    let by_name: HashMap<&str, &Corpus> = corpora.iter().map(|c| (c.name.as_str(), c)).collect();
    let mut written = Vec::new();
    for &analysis in &ctx.config.analyses {
        let mut cache: HashMap<&str, TypeDistribution> = HashMap::new();
        for cmp in &comparisons {
            for member in cmp.first.members.iter().chain(&cmp.second.members) {
                if !cache.contains_key(member.as_str()) {
                    let dist = ctx.distribution(by_name[member.as_str()], analysis)?;
                    cache.insert(member.as_str(), dist);
                }
            }
            let report = compare_groups(ctx, cmp, &cache, stat)?;
            let examples = collect_examples(ctx, &report, cmp, &by_name, analysis)?;
            let stem = format!(
                "compare_{}_vs_{}_{}",
                file_stem(&cmp.first.name),
                file_stem(&cmp.second.name),
                analysis_stem(analysis)
            );
            written.push(write_atomic(&ctx.out, &format!("{stem}.csv"), report.to_csv().as_bytes())?);
            let text = format!(
                "{} vs {} ({}, {}): {} total {}\n\n{}",
                report.first_name,
                report.second_name,
                analysis.category.as_str(),
                analysis.filter.as_str(),
                report.statistic,
                fmt_f64(report.total),
                report.render_table(&examples)
            );
            written.push(write_atomic(&ctx.out, &format!("{stem}.txt"), text.as_bytes())?);
        }
    }
    Ok(written)
}

fn pooled(group: &Group, cache: &HashMap<&str, TypeDistribution>) -> Result<TypeDistribution, CliError> {
    merge_all(group.members.iter().map(|m| &cache[m.as_str()])).in_corpus(&group.name)
}

fn compare_groups(
    ctx: &Context,
    cmp: &GroupComparison,
    cache: &HashMap<&str, TypeDistribution>,
    stat: Statistic,
) -> Result<ComparisonReport, CliError> {
    let first = pooled(&cmp.first, cache)?;
    let second = pooled(&cmp.second, cache)?;
    let label = format!("{} vs {}", cmp.first.name, cmp.second.name);
    let mut report =
        rank_distinctive(&first, &second, ctx.config.comparisons.top_k, stat).in_corpus(&label)?;
    report.first_name = cmp.first.name.clone();
    report.second_name = cmp.second.name.clone();
    Ok(report)
}

/// Shortest example sentences for each ranked type, drawn from the corpora
/// of the side that prefers it.
fn collect_examples(
    ctx: &Context,
    report: &ComparisonReport,
    cmp: &GroupComparison,
    by_name: &HashMap<&str, &Corpus>,
    analysis: Analysis,
) -> Result<Vec<Vec<String>>, CliError> {
    let k = ctx.config.comparisons.examples_per_type;
    if k == 0 {
        return Ok(vec![Vec::new(); report.ranked.len()]);
    }
    report
        .ranked
        .iter()
        .map(|row| {
            let group = match row.preferred_by {
                Side::First => &cmp.first,
                Side::Second => &cmp.second,
            };
            let mut found: Vec<&ItemRecord> = Vec::new();
            for member in &group.members {
                match find_examples(by_name[member.as_str()], &row.label, analysis.category, k) {
                    Ok(items) => found.extend(items),
                    Err(CompareError::UnknownLabel(_)) => {}
                    Err(err) => return Err(err).in_corpus(member),
                }
            }
            found.sort_by(|a, b| a.token_count.cmp(&b.token_count).then_with(|| a.id.cmp(&b.id)));
            found.truncate(k);
            Ok(found.into_iter().map(|item| item.sentence.clone()).collect())
        })
        .collect()
}
