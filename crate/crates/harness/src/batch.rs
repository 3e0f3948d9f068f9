//! Bounded-concurrency generation over a task list.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clean::clean_output;
use crate::client::ChatClient;
use crate::prompt::GenerationTask;
use crate::segment::Segmenter;
use crate::HarnessError;

/// One generated lead, cleaned and split into sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub source_id: String,
    pub model: String,
    pub raw: String,
    pub cleaned: String,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationOutcome {
    pub source_id: String,
    pub result: Result<GenerationResult, HarnessError>,
}

pub fn generate_one(
    client: &ChatClient<'_>,
    model: &str,
    segmenter: &Segmenter,
    task: &GenerationTask,
) -> Result<GenerationResult, HarnessError> {
    let raw = client.generate(task)?;
    let cleaned = clean_output(&raw)?;
    let sentences = segmenter.segment(&cleaned);
    Ok(GenerationResult {
        source_id: task.source_id.clone(),
        model: model.to_string(),
        raw,
        cleaned,
        sentences,
    })
}

/// Runs every task with at most `concurrency` requests in flight. Outcomes
/// come back in task order whatever the completion order was.
pub fn run_generation(
    client: &ChatClient<'_>,
    model: &str,
    tasks: &[GenerationTask],
    concurrency: usize,
) -> Result<Vec<GenerationOutcome>, HarnessError> {
    let segmenter = Segmenter::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(pool.install(|| {
        tasks
            .par_iter()
            .map(|task| GenerationOutcome {
                source_id: task.source_id.clone(),
                result: generate_one(client, model, &segmenter, task),
            })
            .collect()
    }))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| {
            HarnessError::Io(format!("{}:{}: {e}", path.display(), idx + 1))
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Writes through a sibling temp file and renames, so readers never see a
/// partial file.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp).map_err(io)?);
        for row in rows {
            serde_json::to_writer(&mut w, row).map_err(|e| HarnessError::Io(e.to_string()))?;
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::Sleeper;
    use crate::config::GenerationConfig;
    use crate::transport::{HttpRequest, HttpResponse, Transport, TransportError};
    use std::time::Duration;

    /// Echoes the headline back as a labelled two-sentence lead.
    struct Echo;

    impl Transport for Echo {
        fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
            let user = request.body.as_ref().unwrap()["messages"][1]["content"]
                .as_str()
                .unwrap()
                .to_string();
            let headline = user
                .lines()
                .find_map(|l| l.trim().strip_prefix("Headline: "))
                .unwrap();
            let content = if headline == "empty" {
                "Lead:".to_string()
            } else {
                format!("Lead: {headline} happened. Officials said more.\n\nNote: extra")
            };
            Ok(HttpResponse {
                status: 200,
                retry_after: None,
                body: serde_json::json!({"choices": [{"message": {"content": content}}]})
                    .to_string(),
            })
        }
    }

    struct NoSleep;

    impl Sleeper for NoSleep {
        fn sleep(&self, _: Duration) {}
    }

    fn task(i: usize, headline: &str) -> GenerationTask {
        GenerationTask {
            headline: headline.into(),
            lead_three_words: "One two three".into(),
            source_id: format!("id{i}"),
        }
    }

    #[test]
    fn results_keep_task_order() {
        let cfg = GenerationConfig { model: "m".into(), ..GenerationConfig::default() };
        let client = ChatClient::new(&Echo, &NoSleep, &cfg, None);
        let tasks: Vec<_> = (0..40).map(|i| task(i, &format!("Event {i}"))).collect();
        let out = run_generation(&client, "m", &tasks, 8).unwrap();
        let ids: Vec<_> = out.iter().map(|o| o.source_id.clone()).collect();
        let want: Vec<_> = tasks.iter().map(|t| t.source_id.clone()).collect();
        assert_eq!(ids, want);
        let first = out[3].result.as_ref().unwrap();
        assert_eq!(first.cleaned, "Event 3 happened. Officials said more.");
        assert_eq!(first.sentences, ["Event 3 happened.", "Officials said more."]);
    }

    #[test]
    fn failures_are_per_task() {
        let cfg = GenerationConfig { model: "m".into(), ..GenerationConfig::default() };
        let client = ChatClient::new(&Echo, &NoSleep, &cfg, None);
        let out = run_generation(&client, "m", &[task(0, "ok"), task(1, "empty")], 2).unwrap();
        assert!(out[0].result.is_ok());
        assert_eq!(out[1].result, Err(HarnessError::EmptyAfterCleaning));
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tasks.jsonl");
        let tasks = vec![task(0, "a"), task(1, "b")];
        write_jsonl(&path, &tasks).unwrap();
        assert_eq!(read_jsonl::<GenerationTask>(&path).unwrap(), tasks);
    }
}
