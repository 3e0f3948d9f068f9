//! Synthetic news-lead generation: prompt rendering, a chat-completion client
//! with retries and record/replay, output cleaning and sentence splitting.

pub mod archive;
pub mod batch;
pub mod clean;
pub mod client;
pub mod config;
pub mod prompt;
pub mod segment;
pub mod transport;

use thiserror::Error;

pub use archive::{fetch_headlines, parse_months, FetchedArticle, YearMonth};
pub use batch::{read_jsonl, run_generation, write_jsonl, GenerationOutcome, GenerationResult};
pub use clean::clean_output;
pub use client::{ChatClient, RetryPolicy, Sleeper, ThreadSleeper};
pub use config::{GenerationConfig, SamplingParams};
pub use prompt::{render_prompts, GenerationTask, SYSTEM_PROMPT, USER_PROMPT_TEMPLATE};
pub use segment::{segment_sentences, Segmenter};
pub use transport::{HttpTransport, RecordingTransport, ReplayTransport, Transport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("task {source_id}: {reason}")]
    BadTask { source_id: String, reason: String },
    #[error("transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("authentication rejected with status {status}")]
    AuthFailure { status: u16 },
    #[error("rate limited after {attempts} attempt(s)")]
    RateLimited { attempts: u32 },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("request rejected with status {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("output empty after cleaning")]
    EmptyAfterCleaning,
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
    #[error("environment variable {0} is not set")]
    MissingCredential(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl HarnessError {
    /// Stable machine-readable name for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::BadTask { .. } => "bad_task",
            HarnessError::Transport { .. } => "transport",
            HarnessError::AuthFailure { .. } => "auth_failure",
            HarnessError::RateLimited { .. } => "rate_limited",
            HarnessError::MalformedResponse(_) => "malformed_response",
            HarnessError::Rejected { .. } => "rejected",
            HarnessError::EmptyAfterCleaning => "empty_after_cleaning",
            HarnessError::ReplayMiss(_) => "replay_miss",
            HarnessError::MissingCredential(_) => "missing_credential",
            HarnessError::Usage(_) => "usage",
            HarnessError::Io(_) => "io",
        }
    }
}
