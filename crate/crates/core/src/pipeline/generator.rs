//! Candidate generators: a JSONL file source and an HTTP JSON adapter.

use std::collections::HashMap;
use std::path::Path;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::candidate::{check_contiguous, Candidate, CandidateSet};
use crate::rerank::Provenance;
use crate::semantic::BiasMap;

use super::{read_jsonl, PipelineError};

pub const GENERATOR_URL_ENV: &str = "UMF_GENERATOR_URL";
pub const GENERATOR_TOKEN_ENV: &str = "UMF_GENERATOR_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRequest {
    pub source_text: String,
    pub source_lang: String,
    pub target_lang: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "BiasMap::is_empty")]
    pub bias: BiasMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_score: Option<f64>,
    pub rank: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorResponse {
    pub candidates: Vec<WireCandidate>,
    #[serde(default)]
    pub honored_bias: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("generator returned no candidates")]
    EmptyResponse,
    #[error("no candidates for sentence `{0}`")]
    MissingSentence(String),
    #[error("generator config: {0}")]
    Config(String),
}

/// Anything that turns a request into ranked candidates.
pub trait CandidateSource: Send + Sync {
    /// Short label recorded in result provenance.
    fn name(&self) -> &str;

    fn generate(&self, sentence_id: &str, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError>;
}

/// Fetches and validates a candidate set. The returned provenance records
/// the bias map sent and whether the generator applied it.
pub fn fetch_candidates(
    source: &dyn CandidateSource,
    sentence_id: &str,
    request: &GeneratorRequest,
) -> Result<(CandidateSet, Provenance), GeneratorError> {
    let response = source.generate(sentence_id, request)?;
    if response.candidates.is_empty() {
        return Err(GeneratorError::EmptyResponse);
    }
    if response.candidates.len() > request.n {
        return Err(GeneratorError::Protocol(format!(
            "{} candidates returned, {} requested",
            response.candidates.len(),
            request.n
        )));
    }
    let candidates: Vec<Candidate> = response
        .candidates
        .into_iter()
        .map(|c| Candidate {
            text: c.text,
            model_score: c.model_score,
            original_rank: c.rank,
        })
        .collect();
    check_contiguous(&candidates).map_err(|e| GeneratorError::Protocol(e.to_string()))?;
    let set = CandidateSet {
        sentence_id: sentence_id.to_string(),
        source_text: request.source_text.clone(),
        target_lang: request.target_lang.clone(),
        formal: None,
        candidates,
    };
    let provenance = Provenance {
        generator: source.name().to_string(),
        honored_bias: response.honored_bias,
        bias: request.bias.clone(),
    };
    Ok((set, provenance))
}

/// Precomputed candidate sets keyed by sentence id. Never honors bias.
#[derive(Debug, Clone, Default)]
pub struct FileSource {
    sets: HashMap<String, CandidateSet>,
}

impl FileSource {
    pub fn new(sets: impl IntoIterator<Item = CandidateSet>) -> Self {
        FileSource {
            sets: sets.into_iter().map(|s| (s.sentence_id.clone(), s)).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let sets: Vec<CandidateSet> = read_jsonl(path)?;
        let mut seen = std::collections::HashSet::new();
        for s in &sets {
            if !seen.insert(s.sentence_id.clone()) {
                return Err(PipelineError::DuplicateId(s.sentence_id.clone()));
            }
        }
        Ok(FileSource::new(sets))
    }

    pub fn get(&self, sentence_id: &str) -> Option<&CandidateSet> {
        self.sets.get(sentence_id)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

impl CandidateSource for FileSource {
    fn name(&self) -> &str {
        "file"
    }

    fn generate(&self, sentence_id: &str, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        let set = self
            .sets
            .get(sentence_id)
            .ok_or_else(|| GeneratorError::MissingSentence(sentence_id.to_string()))?;
        Ok(GeneratorResponse {
            candidates: set
                .top(request.n)
                .into_iter()
                .map(|c| WireCandidate {
                    text: c.text,
                    model_score: c.model_score,
                    rank: c.original_rank,
                })
                .collect(),
            honored_bias: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub max_retries: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff: Duration::from_millis(500),
        }
    }
}

/// POSTs requests to `{endpoint}/generate`.
pub struct HttpSource {
    client: reqwest::blocking::Client,
    url: String,
    token: Option<String>,
    retry: RetryPolicy,
}

impl HttpSource {
    pub fn new(endpoint: &str, token: Option<String>, timeout: Duration) -> Result<Self, GeneratorError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GeneratorError::Config(e.to_string()))?;
        Ok(HttpSource {
            client,
            url: format!("{}/generate", endpoint.trim_end_matches('/')),
            token,
            retry: RetryPolicy::default(),
        })
    }

    /// Endpoint from `UMF_GENERATOR_URL`, optional bearer token from `UMF_GENERATOR_TOKEN`.
    pub fn from_env() -> Result<Self, GeneratorError> {
        let url = std::env::var(GENERATOR_URL_ENV)
            .map_err(|_| GeneratorError::Config(format!("{GENERATOR_URL_ENV} is not set")))?;
        let token = std::env::var(GENERATOR_TOKEN_ENV).ok().filter(|t| !t.is_empty());
        HttpSource::new(&url, token, Duration::from_secs(120))
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    fn attempt(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, Attempt> {
        let mut req = self.client.post(&self.url).json(request);
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(GeneratorError::Transport(format!("HTTP {status}"))));
        }
        let body = resp.text().map_err(|e| Attempt::Retry(e.to_string()))?;
        serde_json::from_str(&body)
            .map_err(|e| Attempt::Fatal(GeneratorError::Protocol(format!("bad response body: {e}"))))
    }
}

enum Attempt {
    Retry(String),
    Fatal(GeneratorError),
}

impl CandidateSource for HttpSource {
    fn name(&self) -> &str {
        "http"
    }

    fn generate(&self, _sentence_id: &str, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        let mut backoff = self.retry.initial_backoff;
        let mut attempt = 0;
        loop {
            match self.attempt(request) {
                Ok(r) => return Ok(r),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) if attempt >= self.retry.max_retries => {
                    return Err(GeneratorError::Transport(format!(
                        "{msg} (after {} attempts)",
                        attempt + 1
                    )))
                }
                Err(Attempt::Retry(msg)) => {
                    log::warn!("generator request failed: {msg}; retrying in {backoff:?}");
                    thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
            }
        }
    }
}
