//! Command-line orchestration for the diversity, comparison, parsability and
//! generation workflows. Every command reads one JSON configuration and writes
//! byte-stable outputs into the output directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use typediv::Statistic;

use crate::commands::generate::{FetchOptions, GenerateOptions, NetOptions};
use crate::commands::Context;
use crate::config::RunConfig;
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "typediv", version, about = "Syntactic diversity analysis of parsed news corpora")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Bootstrap seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for data-parallel work.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Keep the unknown lexical type bucket in distributions.
    #[arg(long, global = true)]
    pub include_unknown: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load corpora and write normalized records and label distributions.
    Ingest,
    /// Bootstrapped Shannon/Simpson estimates per corpus.
    Diversity,
    /// Rank the types that most distinguish two corpora or groups.
    Compare {
        /// Ranking statistic: jsd or freq-delta.
        #[arg(long, value_parser = parse_stat)]
        stat: Option<Statistic>,
    },
    /// Parse-outcome and length-binned cost tables.
    Parsability,
    /// Generate synthetic leads for a task file.
    Generate(GenerateArgs),
    /// Download headlines and leads into a task file.
    FetchHeadlines(FetchArgs),
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// Endpoint URL, overriding the configuration.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Serve responses from a replay file; no network access.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Append every live exchange to a replay file.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Task file (JSONL); defaults to `<out>/tasks.jsonl`.
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    #[command(flatten)]
    pub net: NetArgs,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// `YYYY-MM` or `YYYY-MM..YYYY-MM`.
    #[arg(long)]
    pub months: Option<String>,
    #[command(flatten)]
    pub net: NetArgs,
}

fn parse_stat(s: &str) -> Result<Statistic, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown statistic {s:?} (expected jsd or freq-delta)"))
}

impl From<NetArgs> for NetOptions {
    fn from(a: NetArgs) -> Self {
        NetOptions {
            endpoint: a.endpoint,
            replay: a.replay,
            record: a.record,
        }
    }
}

fn load_config(cli: &Cli, required: bool) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if required => {
            return Err(CliError::Usage("this command needs --config <file>".into()));
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.bootstrap.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    config.include_unknown |= cli.include_unknown;
    Ok(config)
}

/// Run one command; returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let needs_config = !matches!(cli.command, Command::Generate(_) | Command::FetchHeadlines(_));
    let config = load_config(&cli, needs_config)?;
    match cli.command {
        Command::Generate(args) => {
            let opts = GenerateOptions {
                tasks: args.tasks,
                model: args.model,
                concurrency: args.concurrency,
                net: args.net.into(),
            };
            commands::generate::generate(&config, &config.output_dir, &opts)
        }
        Command::FetchHeadlines(args) => {
            let opts = FetchOptions {
                months: args.months,
                net: args.net.into(),
            };
            commands::generate::fetch(&config, &config.output_dir, &opts)
        }
        command => {
            let ctx = Context::new(config)?;
            ctx.write_resolved()?;
            match command {
                Command::Ingest => commands::ingest::run(&ctx),
                Command::Diversity => commands::diversity::run(&ctx),
                Command::Compare { stat } => commands::compare::run(&ctx, stat),
                Command::Parsability => commands::parsability::run(&ctx),
                Command::Generate(_) | Command::FetchHeadlines(_) => unreachable!(),
            }
        }
    }
}

/// Parse `args`, run, and map the outcome to an exit code. Failures print one
/// JSON line to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            print!("{err}");
            return 0;
        }
        Err(err) => {
            let message = err.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).to_json_line());
            return 2;
        }
    };
    match run(cli) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json_line());
            err.exit_code()
        }
    }
}
