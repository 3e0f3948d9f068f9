use std::path::PathBuf;

use typediv::csvfmt::csv_row;
use typediv::ingest::write_jsonl;

use super::{analysis_stem, Context};
use crate::error::CliError;
use crate::output::{file_stem, write_atomic};

/// Normalized item JSONL, one distribution CSV per analysis, and a summary.
pub fn run(ctx: &Context) -> Result<Vec<PathBuf>, CliError> {
    let corpora = ctx.load_corpora()?;
    let mut written = Vec::new();
    let mut summary = csv_row(["corpus", "kind", "year", "items", "parsed", "unknown_lextypes"]);
    for corpus in &corpora {
        let stem = file_stem(&corpus.name);
        let mut jsonl = Vec::new();
        write_jsonl(&corpus.items, &mut jsonl).map_err(|e| CliError::io(&ctx.out, e))?;
        written.push(write_atomic(&ctx.out.join("corpora"), &format!("{stem}.jsonl"), &jsonl)?);
        for &analysis in &ctx.config.analyses {
            let dist = ctx.distribution(corpus, analysis)?;
            written.push(write_atomic(
                &ctx.out.join("distributions"),
                &format!("{stem}_{}.csv", analysis_stem(analysis)),
                dist.to_csv().as_bytes(),
            )?);
        }
        summary.push_str(&csv_row([
            corpus.name.clone(),
            serde_json::to_value(corpus.source_kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            corpus.year_tag.clone(),
            corpus.items.len().to_string(),
            corpus.parsed_items().count().to_string(),
            corpus.unknown_lextypes().to_string(),
        ]));
    }
    written.push(write_atomic(&ctx.out, "ingest_summary.csv", summary.as_bytes())?);
    Ok(written)
}
