use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::json;
use typediv_harness::archive::{fetch_headlines, parse_months};
use typediv_harness::{
    read_jsonl, run_generation, write_jsonl, ChatClient, GenerationConfig, GenerationResult,
    GenerationTask, HarnessError, HttpTransport, RecordingTransport, ReplayTransport, RetryPolicy,
    ThreadSleeper, Transport,
};

use crate::config::{ArchiveSection, RunConfig};
use crate::error::CliError;
use crate::output::file_stem;

/// Network options shared by `generate` and `fetch-headlines`.
#[derive(Debug, Clone, Default)]
pub struct NetOptions {
    pub endpoint: Option<String>,
    pub replay: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

fn build_transport(net: &NetOptions, timeout: Duration) -> Result<Box<dyn Transport>, CliError> {
    match (&net.replay, &net.record) {
        (Some(_), Some(_)) => Err(CliError::Usage("--replay and --record are mutually exclusive".into())),
        (Some(path), None) => Ok(Box::new(ReplayTransport::load(path).map_err(|e| CliError::io(path, e))?)),
        (None, Some(path)) => Ok(Box::new(
            RecordingTransport::new(HttpTransport::new(timeout), path).map_err(|e| CliError::io(path, e))?,
        )),
        (None, None) => Ok(Box::new(HttpTransport::new(timeout))),
    }
}

/// Replayed runs never need a credential; live ones read it from `var`.
fn credential(net: &NetOptions, var: &str) -> Result<Option<String>, CliError> {
    if net.replay.is_some() {
        return Ok(None);
    }
    match std::env::var(var) {
        Ok(value) if !value.is_empty() => Ok(Some(value)),
        _ => Err(HarnessError::MissingCredential(var.to_string()).into()),
    }
}

fn io_error(path: &Path) -> impl Fn(HarnessError) -> CliError + '_ {
    move |err| match err {
        HarnessError::Io(message) => CliError::Io { path: path.to_path_buf(), message },
        other => other.into(),
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub tasks: Option<PathBuf>,
    pub model: Option<String>,
    pub concurrency: Option<usize>,
    pub net: NetOptions,
}

/// Generate one lead per task. Successful results go to
/// `generations/<model>.jsonl` in task order; failures to `<model>.errors.jsonl`.
pub fn generate(config: &RunConfig, out: &Path, opts: &GenerateOptions) -> Result<Vec<PathBuf>, CliError> {
    let mut gen: GenerationConfig = config.generation.clone();
    if let Some(model) = &opts.model {
        gen.model = model.clone();
    }
    if let Some(endpoint) = &opts.net.endpoint {
        gen.endpoint = endpoint.clone();
    }
    if let Some(n) = opts.concurrency {
        gen.concurrency = n;
    }
    if gen.model.trim().is_empty() {
        return Err(CliError::Usage("no model given (--model or generation.model)".into()));
    }
    if gen.concurrency == 0 {
        return Err(CliError::Usage("concurrency must be at least 1".into()));
    }
    let tasks_path = opts.tasks.clone().unwrap_or_else(|| out.join("tasks.jsonl"));
    let tasks: Vec<GenerationTask> = read_jsonl(&tasks_path).map_err(io_error(&tasks_path))?;
    if tasks.is_empty() {
        return Err(CliError::Usage(format!("{}: no tasks", tasks_path.display())));
    }
    let api_key = credential(&opts.net, &gen.api_key_env)?;
    let transport = build_transport(&opts.net, Duration::from_secs(gen.timeout_secs))?;
    let client = ChatClient::new(&*transport, &ThreadSleeper, &gen, api_key);
    let outcomes = run_generation(&client, &gen.model, &tasks, gen.concurrency)?;

    let mut results: Vec<GenerationResult> = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome.result {
            Ok(result) => results.push(result),
            Err(err) => {
                log::error!("{}: {err}", outcome.source_id);
                failures.push(json!({
                    "source_id": outcome.source_id,
                    "error": err.kind(),
                    "message": err.to_string(),
                }));
            }
        }
    }
    let dir = out.join("generations");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let stem = file_stem(&gen.model);
    let results_path = dir.join(format!("{stem}.jsonl"));
    write_jsonl(&results_path, &results).map_err(io_error(&results_path))?;
    let errors_path = dir.join(format!("{stem}.errors.jsonl"));
    if failures.is_empty() {
        if errors_path.exists() {
            std::fs::remove_file(&errors_path).map_err(|e| CliError::io(&errors_path, e))?;
        }
        return Ok(vec![results_path]);
    }
    write_jsonl(&errors_path, &failures).map_err(io_error(&errors_path))?;
    Err(CliError::Generation {
        failed: failures.len(),
        total: tasks.len(),
        errors: errors_path,
    })
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub months: Option<String>,
    pub net: NetOptions,
}

/// Download archive months into `tasks.jsonl` and `human_leads.jsonl`.
pub fn fetch(config: &RunConfig, out: &Path, opts: &FetchOptions) -> Result<Vec<PathBuf>, CliError> {
    let archive: &ArchiveSection = &config.archive;
    let months = opts
        .months
        .as_deref()
        .or(archive.months.as_deref())
        .ok_or_else(|| CliError::Usage("no month range given (--months or archive.months)".into()))?;
    let months = parse_months(months)?;
    let endpoint = opts.net.endpoint.clone().unwrap_or_else(|| archive.endpoint.clone());
    let api_key = credential(&opts.net, &archive.api_key_env)?;
    let gen = &config.generation;
    let transport = build_transport(&opts.net, Duration::from_secs(gen.timeout_secs))?;
    let articles = fetch_headlines(
        &*transport,
        &ThreadSleeper,
        RetryPolicy::from(gen),
        &endpoint,
        api_key.as_deref(),
        &months,
    )?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let tasks: Vec<GenerationTask> = articles.iter().map(|a| a.task()).collect();
    let tasks_path = out.join("tasks.jsonl");
    let leads_path = out.join("human_leads.jsonl");
    write_jsonl(&tasks_path, &tasks).map_err(io_error(&tasks_path))?;
    write_jsonl(&leads_path, &articles).map_err(io_error(&leads_path))?;
    Ok(vec![tasks_path, leads_path])
}
