//! HTTP transport with optional recording and offline replay.
//!
//! Replay entries are keyed by a SHA-256 digest over the request's method,
//! URL, query, body and replay tag. Credentials are never part of the digest
//! and never written to disk.

use std::collections::{HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Get,
    Post,
}

#[derive(Clone, PartialEq, Eq)]
pub enum Auth {
    Bearer(String),
    Query { name: String, value: String },
}

impl std::fmt::Debug for Auth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Auth::Bearer(_) => f.write_str("Bearer(<redacted>)"),
            Auth::Query { name, .. } => write!(f, "Query({name}=<redacted>)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HttpRequest {
    pub method: Method,
    pub url: String,
    pub query: Vec<(String, String)>,
    pub body: Option<Value>,
    pub auth: Option<Auth>,
    /// Extra digest input that is not sent, e.g. the task's source id.
    pub replay_tag: Option<String>,
}

impl HttpRequest {
    pub fn get(url: impl Into<String>) -> Self {
        HttpRequest {
            method: Method::Get,
            url: url.into(),
            query: Vec::new(),
            body: None,
            auth: None,
            replay_tag: None,
        }
    }

    pub fn post(url: impl Into<String>, body: Value) -> Self {
        HttpRequest {
            method: Method::Post,
            body: Some(body),
            ..HttpRequest::get(url)
        }
    }

    /// What gets persisted: everything except credentials.
    pub fn public_view(&self) -> Value {
        json!({
            "method": self.method,
            "url": self.url,
            "query": self.query,
            "body": self.body,
            "tag": self.replay_tag,
        })
    }

    pub fn digest(&self) -> String {
        // serde_json maps are ordered, so this encoding is canonical
        let canonical = self.public_view().to_string();
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpResponse {
    pub status: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_after: Option<u64>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("connection failed: {0}")]
    Connection(String),
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
    #[error("replay file: {0}")]
    Replay(String),
}

impl TransportError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, TransportError::Timeout(_) | TransportError::Connection(_))
    }
}

pub trait Transport: Send + Sync {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(request)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        (**self).send(request)
    }
}

/// Live HTTPS via ureq. Non-2xx statuses come back as responses, not errors.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build();
        HttpTransport {
            agent: ureq::Agent::new_with_config(config),
        }
    }
}

fn map_ureq_error(err: ureq::Error) -> TransportError {
    match err {
        ureq::Error::Timeout(t) => TransportError::Timeout(t.to_string()),
        other => TransportError::Connection(other.to_string()),
    }
}

impl Transport for HttpTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let mut query = request.query.clone();
        let mut bearer = None;
        match &request.auth {
            Some(Auth::Bearer(token)) => bearer = Some(format!("Bearer {token}")),
            Some(Auth::Query { name, value }) => query.push((name.clone(), value.clone())),
            None => {}
        }
        let result = match request.method {
            Method::Get => {
                let mut req = self.agent.get(&request.url).query_pairs(query);
                if let Some(b) = &bearer {
                    req = req.header("Authorization", b);
                }
                req.call()
            }
            Method::Post => {
                let mut req = self.agent.post(&request.url).query_pairs(query);
                if let Some(b) = &bearer {
                    req = req.header("Authorization", b);
                }
                req.send_json(request.body.clone().unwrap_or(Value::Null))
            }
        };
        let mut response = result.map_err(map_ureq_error)?;
        let status = response.status().as_u16();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse().ok());
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(map_ureq_error)?;
        Ok(HttpResponse {
            status,
            retry_after,
            body,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ReplayEntry {
    key: String,
    request: Value,
    response: HttpResponse,
}

/// Appends every exchange of the wrapped transport to a JSONL file.
pub struct RecordingTransport<T> {
    inner: T,
    log: Mutex<File>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(RecordingTransport {
            inner,
            log: Mutex::new(file),
        })
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let response = self.inner.send(request)?;
        let entry = ReplayEntry {
            key: request.digest(),
            request: request.public_view(),
            response: response.clone(),
        };
        let mut line = serde_json::to_string(&entry).expect("replay entry serializes");
        line.push('\n');
        let mut log = self.log.lock().unwrap_or_else(|p| p.into_inner());
        // one write per line keeps concurrent appends whole
        log.write_all(line.as_bytes())
            .and_then(|_| log.flush())
            .map_err(|e| TransportError::Replay(e.to_string()))?;
        Ok(response)
    }
}

/// Serves recorded responses in recorded order per request digest. Never
/// touches the network.
pub struct ReplayTransport {
    entries: Mutex<HashMap<String, VecDeque<HttpResponse>>>,
}

impl ReplayTransport {
    pub fn load(path: &Path) -> Result<Self, TransportError> {
        let file = File::open(path)
            .map_err(|e| TransportError::Replay(format!("{}: {e}", path.display())))?;
        let mut entries: HashMap<String, VecDeque<HttpResponse>> = HashMap::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| TransportError::Replay(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ReplayEntry = serde_json::from_str(&line)
                .map_err(|e| TransportError::Replay(format!("line {}: {e}", idx + 1)))?;
            entries.entry(entry.key).or_default().push_back(entry.response);
        }
        Ok(ReplayTransport {
            entries: Mutex::new(entries),
        })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (HttpRequest, HttpResponse)>) -> Self {
        let mut entries: HashMap<String, VecDeque<HttpResponse>> = HashMap::new();
        for (request, response) in pairs {
            entries.entry(request.digest()).or_default().push_back(response);
        }
        ReplayTransport {
            entries: Mutex::new(entries),
        }
    }
}

impl Transport for ReplayTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let key = request.digest();
        let mut entries = self.entries.lock().unwrap_or_else(|p| p.into_inner());
        entries
            .get_mut(&key)
            .and_then(VecDeque::pop_front)
            .ok_or(TransportError::ReplayMiss(key))
    }
}
