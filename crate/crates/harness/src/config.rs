use serde::{Deserialize, Serialize};

/// Sampling settings sent with every completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub top_k: u32,
    pub repetition_penalty: f64,
    pub max_new_tokens: u32,
    pub num_return_sequences: u32,
    pub num_beams: u32,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            temperature: 0.7,
            top_p: 0.92,
            top_k: 50,
            repetition_penalty: 1.05,
            max_new_tokens: 1000,
            num_return_sequences: 1,
            num_beams: 1,
        }
    }
}

/// Request fields that some OpenAI-compatible servers reject. They are
/// dropped, with a warning, when the server names them in a 400/422 reply.
pub const OPTIONAL_FIELDS: [&str; 3] = ["top_k", "repetition_penalty", "num_beams"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    /// Chat-completions URL, e.g. `https://api.openai.com/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub sampling: SamplingParams,
    /// Optional fields never sent to this endpoint.
    pub drop_fields: Vec<String>,
    pub concurrency: usize,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub timeout_secs: u64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: String::new(),
            api_key_env: "OPENAI_API_KEY".into(),
            sampling: SamplingParams::default(),
            drop_fields: Vec::new(),
            concurrency: 4,
            max_retries: 5,
            backoff_base_ms: 500,
            timeout_secs: 120,
        }
    }
}
