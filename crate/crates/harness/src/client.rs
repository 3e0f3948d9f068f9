//! Chat-completion calls with retry, rate-limit handling and field dropping.

use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::config::{GenerationConfig, OPTIONAL_FIELDS};
use crate::prompt::{render_prompts, GenerationTask};
use crate::transport::{Auth, HttpRequest, HttpResponse, Transport, TransportError};
use crate::HarnessError;

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Retries transport failures, 5xx and 429 up to `max_retries` times with
/// exponential backoff. 429 waits for `Retry-After` when the server sends it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub backoff_base: Duration,
}

impl RetryPolicy {
    pub fn backoff(&self, retry: u32) -> Duration {
        self.backoff_base.saturating_mul(1u32 << retry.min(16))
    }
}

impl From<&GenerationConfig> for RetryPolicy {
    fn from(config: &GenerationConfig) -> Self {
        RetryPolicy {
            max_retries: config.max_retries,
            backoff_base: Duration::from_millis(config.backoff_base_ms),
        }
    }
}

/// Send `request`, applying the retry policy. Returns the first 2xx response.
pub fn send_with_retry(
    transport: &dyn Transport,
    sleeper: &dyn Sleeper,
    policy: RetryPolicy,
    request: &HttpRequest,
) -> Result<HttpResponse, HarnessError> {
    let mut retries = 0;
    loop {
        let wait = match transport.send(request) {
            Ok(resp) if (200..300).contains(&resp.status) => return Ok(resp),
            Ok(resp) if resp.status == 401 || resp.status == 403 => {
                return Err(HarnessError::AuthFailure { status: resp.status });
            }
            Ok(resp) if resp.status == 429 => {
                if retries >= policy.max_retries {
                    return Err(HarnessError::RateLimited {
                        attempts: retries + 1,
                    });
                }
                resp.retry_after
                    .map(Duration::from_secs)
                    .unwrap_or_else(|| policy.backoff(retries))
            }
            Ok(resp) if resp.status >= 500 => {
                if retries >= policy.max_retries {
                    return Err(HarnessError::Transport {
                        attempts: retries + 1,
                        message: format!("server error {}", resp.status),
                    });
                }
                policy.backoff(retries)
            }
            Ok(resp) => {
                return Err(HarnessError::Rejected {
                    status: resp.status,
                    body: resp.body,
                })
            }
            Err(err) if err.is_retryable() => {
                if retries >= policy.max_retries {
                    return Err(HarnessError::Transport {
                        attempts: retries + 1,
                        message: err.to_string(),
                    });
                }
                policy.backoff(retries)
            }
            Err(TransportError::ReplayMiss(key)) => return Err(HarnessError::ReplayMiss(key)),
            Err(err) => {
                return Err(HarnessError::Transport {
                    attempts: retries + 1,
                    message: err.to_string(),
                })
            }
        };
        log::debug!("retry {} for {} after {:?}", retries + 1, request.url, wait);
        sleeper.sleep(wait);
        retries += 1;
    }
}

pub struct ChatClient<'a> {
    transport: &'a dyn Transport,
    sleeper: &'a dyn Sleeper,
    config: &'a GenerationConfig,
    api_key: Option<String>,
}

impl<'a> ChatClient<'a> {
    pub fn new(
        transport: &'a dyn Transport,
        sleeper: &'a dyn Sleeper,
        config: &'a GenerationConfig,
        api_key: Option<String>,
    ) -> Self {
        ChatClient {
            transport,
            sleeper,
            config,
            api_key,
        }
    }

    /// Request body with every sampling field, minus `dropped`.
    pub fn request_body(&self, system: &str, user: &str, dropped: &[String]) -> Value {
        let s = &self.config.sampling;
        let mut body = Map::new();
        body.insert("model".into(), json!(self.config.model));
        body.insert(
            "messages".into(),
            json!([
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ]),
        );
        body.insert("temperature".into(), json!(s.temperature));
        body.insert("top_p".into(), json!(s.top_p));
        body.insert("top_k".into(), json!(s.top_k));
        body.insert("repetition_penalty".into(), json!(s.repetition_penalty));
        body.insert("max_tokens".into(), json!(s.max_new_tokens));
        body.insert("n".into(), json!(s.num_return_sequences));
        body.insert("num_beams".into(), json!(s.num_beams));
        for field in dropped {
            body.remove(field);
        }
        Value::Object(body)
    }

    /// Raw text of the first completion for `task`.
    pub fn generate(&self, task: &GenerationTask) -> Result<String, HarnessError> {
        let (system, user) = render_prompts(task)?;
        let mut dropped: Vec<String> = self.config.drop_fields.clone();
        loop {
            let mut request =
                HttpRequest::post(&self.config.endpoint, self.request_body(&system, &user, &dropped));
            request.auth = self.api_key.clone().map(Auth::Bearer);
            request.replay_tag = Some(format!("{}:{}", self.config.model, task.source_id));
            match send_with_retry(self.transport, self.sleeper, self.config.into(), &request) {
                Ok(resp) => return first_completion(&resp.body),
                Err(HarnessError::Rejected { status, body }) if status == 400 || status == 422 => {
                    let rejected = OPTIONAL_FIELDS
                        .iter()
                        .find(|f| !dropped.iter().any(|d| d == *f) && body.contains(*f));
                    match rejected {
                        Some(field) => {
                            log::warn!(
                                "{}: endpoint rejected `{field}`, retrying without it",
                                self.config.model
                            );
                            dropped.push(field.to_string());
                        }
                        None => return Err(HarnessError::Rejected { status, body }),
                    }
                }
                Err(err) => return Err(err),
            }
        }
    }
}

/// `choices[0].message.content` of an OpenAI-style response.
pub fn first_completion(body: &str) -> Result<String, HarnessError> {
    let value: Value = serde_json::from_str(body)
        .map_err(|e| HarnessError::MalformedResponse(format!("invalid json: {e}")))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| HarnessError::MalformedResponse("missing choices[0].message.content".into()))
}
