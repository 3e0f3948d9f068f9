use std::path::{Path, PathBuf};
use std::time::Duration;

use typediv_harness::archive::{fetch_headlines, parse_months};
use typediv_harness::transport::{HttpRequest, HttpResponse, TransportError};
use typediv_harness::{
    read_jsonl, render_prompts, run_generation, write_jsonl, ChatClient, GenerationConfig,
    GenerationResult, GenerationTask, HarnessError, ReplayTransport, RetryPolicy, Sleeper,
    Transport,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct NoSleep;

impl Sleeper for NoSleep {
    fn sleep(&self, _: Duration) {}
}

fn fixture_config() -> GenerationConfig {
    GenerationConfig {
        model: "fixture-model".into(),
        endpoint: "http://127.0.0.1:9/v1/chat/completions".into(),
        ..GenerationConfig::default()
    }
}

#[test]
fn prompts_match_golden_bytes() {
    let task = GenerationTask {
        headline: "X wins Y".into(),
        lead_three_words: "The city of".into(),
        source_id: "golden".into(),
    };
    let (system, user) = render_prompts(&task).unwrap();
    assert_eq!(system.as_bytes(), std::fs::read(fixture("system_prompt.txt")).unwrap());
    assert_eq!(user.as_bytes(), std::fs::read(fixture("user_prompt_x_wins_y.txt")).unwrap());
    assert_eq!(render_prompts(&task).unwrap(), (system, user));
}

fn replay_run(out: &Path) {
    let tasks: Vec<GenerationTask> = read_jsonl(&fixture("tasks.jsonl")).unwrap();
    let replay = ReplayTransport::load(&fixture("replay_generate.jsonl")).unwrap();
    let cfg = fixture_config();
    let client = ChatClient::new(&replay, &NoSleep, &cfg, None);
    let outcomes = run_generation(&client, &cfg.model, &tasks, 4).unwrap();
    let results: Vec<GenerationResult> = outcomes.into_iter().map(|o| o.result.unwrap()).collect();
    write_jsonl(out, &results).unwrap();
}

#[test]
fn replayed_run_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.jsonl");
    let second = dir.path().join("second.jsonl");
    replay_run(&first);
    replay_run(&second);
    let expected = std::fs::read(fixture("results_expected.jsonl")).unwrap();
    assert_eq!(std::fs::read(&first).unwrap(), expected);
    assert_eq!(std::fs::read(&second).unwrap(), expected);
}

#[test]
fn replay_miss_is_reported_not_fetched() {
    let replay = ReplayTransport::load(&fixture("replay_generate.jsonl")).unwrap();
    let cfg = GenerationConfig { model: "other-model".into(), ..fixture_config() };
    let client = ChatClient::new(&replay, &NoSleep, &cfg, None);
    let task = GenerationTask {
        headline: "Unseen".into(),
        lead_three_words: "Not in replay".into(),
        source_id: "x".into(),
    };
    assert!(matches!(client.generate(&task), Err(HarnessError::ReplayMiss(_))));
}

fn policy() -> RetryPolicy {
    RetryPolicy { max_retries: 5, backoff_base: Duration::from_millis(1) }
}

#[test]
fn archive_fixture_yields_valid_tasks() {
    let replay = ReplayTransport::load(&fixture("replay_archive.jsonl")).unwrap();
    let months = parse_months("2023-01").unwrap();
    let articles = fetch_headlines(
        &replay,
        &NoSleep,
        policy(),
        "http://127.0.0.1:9/svc/archive/v1",
        Some("secret"),
        &months,
    )
    .unwrap();
    let tasks: Vec<GenerationTask> = articles.iter().map(|a| a.task()).collect();
    assert_eq!(tasks.len(), 2);
    assert_eq!(tasks[0].lead_three_words, "The City Council");
    assert_eq!(tasks[1].lead_three_words, "Markets fell sharply");
    assert!(tasks.iter().all(|t| t.validate().is_ok()));
}

struct Unauthorized;

impl Transport for Unauthorized {
    fn send(&self, _: &HttpRequest) -> Result<HttpResponse, TransportError> {
        Ok(HttpResponse { status: 401, retry_after: None, body: "{}".into() })
    }
}

#[test]
fn unauthenticated_archive_request_fails() {
    let months = parse_months("2023-01").unwrap();
    assert_eq!(
        fetch_headlines(&Unauthorized, &NoSleep, policy(), "http://x", None, &months),
        Err(HarnessError::AuthFailure { status: 401 })
    );
}
