use std::path::PathBuf;

use rayon::prelude::*;
use typediv::parsability::{bins_csv, render_bins_table, render_stats_table, stats_csv};
use typediv::{aggregate_stats, binned_costs, LengthBinTable, ParseStats};

use super::Context;
use crate::error::{CliError, InCorpus};
use crate::output::write_atomic;

/// Aggregate and length-binned tables, rows in configuration order.
pub fn run(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let corpora = ctx.load_corpora()?;
    let results: Vec<(ParseStats, LengthBinTable)> = corpora
        .par_iter()
        .zip(&ctx.config.corpora)
        .map(|(corpus, spec)| {
            let mut stats = aggregate_stats(corpus).in_corpus(&corpus.name)?;
            stats.ram_limit_gb = spec.ram_limit_gb;
            let bins = binned_costs(corpus).in_corpus(&corpus.name)?;
            Ok((stats, bins))
        })
        .collect::<Result<_, CliError>>()?;
    let stats: Vec<(&str, &ParseStats)> =
        corpora.iter().zip(&results).map(|(c, r)| (c.name.as_str(), &r.0)).collect();
    let bins: Vec<(&str, &LengthBinTable)> =
        corpora.iter().zip(&results).map(|(c, r)| (c.name.as_str(), &r.1)).collect();
    Ok(vec![
        write_atomic(&ctx.out, "parsability_stats.txt", render_stats_table(&stats).as_bytes())?,
        write_atomic(&ctx.out, "parsability_stats.csv", stats_csv(&stats).as_bytes())?,
        write_atomic(&ctx.out, "parsability_bins.txt", render_bins_table(&bins).as_bytes())?,
        write_atomic(&ctx.out, "parsability_bins.csv", bins_csv(&bins).as_bytes())?,
    ])
}
