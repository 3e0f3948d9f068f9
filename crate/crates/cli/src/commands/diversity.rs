use std::path::PathBuf;

use rayon::prelude::*;
use typediv::csvfmt::{csv_row, fmt_f64};
use typediv::diversity::{bootstrap_diversity, common_target_n, BootstrapParams, DiversityEstimate};
use typediv::TypeDistribution;

use super::{analysis_stem, Context};
use crate::config::{Analysis, TargetN};
use crate::error::{CliError, InCorpus};
use crate::output::write_atomic;

pub const HEADER: [&str; 11] = [
    "corpus", "category", "filter", "metric", "point", "boot_mean", "ci_low", "ci_high",
    "target_n", "iterations", "seed",
];

/// One CSV per (analysis, metric) with a row per corpus, highest point first.
pub fn run(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let corpora = ctx.load_corpora()?;
    let boot = &ctx.config.bootstrap;
    let mut written = Vec::new();
    for &analysis in &ctx.config.analyses {
        let dists: Vec<TypeDistribution> = corpora
            .par_iter()
            .map(|c| ctx.distribution(c, analysis))
            .collect::<Result<_, _>>()?;
        let target_n = match boot.target_n {
            TargetN::Fixed(n) => n,
            TargetN::Rule(_) => common_target_n(&dists).expect("at least one corpus"),
        };
        for &metric in &ctx.config.metrics {
            let params = BootstrapParams {
                metric,
                target_n,
                iterations: boot.iterations,
                seed: boot.seed,
                resampling: boot.resampling,
            };
            let mut rows: Vec<(&str, DiversityEstimate)> = Vec::new();
            for (corpus, dist) in corpora.iter().zip(&dists) {
                let estimate = bootstrap_diversity(dist, &params).in_corpus(&corpus.name)?;
                rows.push((&corpus.name, estimate));
            }
            rows.sort_by(|a, b| b.1.point.total_cmp(&a.1.point).then_with(|| a.0.cmp(b.0)));
            let csv = render(analysis, &rows);
            let name = format!("diversity_{}_{}.csv", analysis_stem(analysis), metric.as_str());
            written.push(write_atomic(&ctx.out, &name, csv.as_bytes())?);
        }
    }
    Ok(written)
}

pub fn render(analysis: Analysis, rows: &[(&str, DiversityEstimate)]) -> String {
    let mut out = csv_row(HEADER);
    for (corpus, e) in rows {
        out.push_str(&csv_row([
            corpus.to_string(),
            analysis.category.as_str().to_string(),
            analysis.filter.as_str().to_string(),
            e.metric.as_str().to_string(),
            fmt_f64(e.point),
            fmt_f64(e.boot_mean),
            fmt_f64(e.ci_low),
            fmt_f64(e.ci_high),
            e.target_n.to_string(),
            e.iterations.to_string(),
            e.seed.to_string(),
        ]));
    }
    out
}
