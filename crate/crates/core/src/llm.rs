//! Text-completion providers: the [`LlmProvider`] trait, an HTTP client with
//! retry and concurrency limits, and a scriptable deterministic mock.

use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, ProviderErrorKind, Result};
use crate::transport::{
    classify_request_error, classify_status, with_retry, HttpConfig, Semaphore, TransportSnapshot,
    TransportStats,
};

/// One completion call.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_tokens: usize,
    pub temperature: f64,
    pub seed: Option<u64>,
}

impl CompletionRequest {
    pub fn new(prompt: impl Into<String>) -> Self {
        CompletionRequest {
            prompt: prompt.into(),
            max_tokens: 512,
            temperature: 0.0,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_tokens == 0 {
            return Err(Error::InvalidConfig("max_tokens must be positive".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "temperature must be a finite non-negative number, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// A provider's answer to a [`CompletionRequest`].
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    /// Log-probability per generated token; empty when the backend omits them.
    pub token_logprobs: Vec<f64>,
    pub model: String,
    pub latency_ms: u64,
}

pub trait LlmProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion>;
    fn model(&self) -> &str;
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Deterministic offline provider.
///
/// Responses come from an ordered script of `(needle, response)` entries: the
/// first entry whose needle is contained in the prompt wins. Prompts that
/// match nothing get a pseudo-response derived from a hash of the seed and
/// the prompt, so equal inputs always produce equal outputs.
pub struct MockLlm {
    seed: u64,
    model: String,
    script: Vec<(String, String)>,
    calls: Mutex<Vec<String>>,
}

impl MockLlm {
    pub fn new(seed: u64) -> Self {
        MockLlm {
            seed,
            model: "mock-llm".into(),
            script: Vec::new(),
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    /// Append a script entry. Entries are consulted in insertion order.
    pub fn respond(mut self, needle: impl Into<String>, response: impl Into<String>) -> Self {
        self.script.push((needle.into(), response.into()));
        self
    }

    pub fn add_response(&mut self, needle: impl Into<String>, response: impl Into<String>) {
        self.script.push((needle.into(), response.into()));
    }

    /// Every prompt received so far, in call order.
    pub fn received_prompts(&self) -> Vec<String> {
        self.calls.lock().unwrap().clone()
    }

    fn digest_for(&self, prompt: &str) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(prompt.as_bytes());
        hasher.finalize().into()
    }

    fn logprobs_for(digest: &[u8; 32], text: &str) -> Vec<f64> {
        text.split_whitespace()
            .enumerate()
            .map(|(i, _)| -5.0 * f64::from(digest[i % digest.len()]) / 255.0)
            .collect()
    }
}

impl LlmProvider for MockLlm {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion> {
        request.validate()?;
        self.calls.lock().unwrap().push(request.prompt.clone());
        let digest = self.digest_for(&request.prompt);
        let text = self
            .script
            .iter()
            .find(|(needle, _)| request.prompt.contains(needle))
            .map(|(_, response)| response.clone())
            .unwrap_or_else(|| format!("mock response {}", &hex(&digest)[..12]));
        let token_logprobs = Self::logprobs_for(&digest, &text);
        Ok(Completion {
            text,
            token_logprobs,
            model: self.model.clone(),
            latency_ms: 0,
        })
    }

    fn model(&self) -> &str {
        &self.model
    }
}

#[derive(Serialize)]
struct WireCompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    max_tokens: usize,
    temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct WireCompletionResponse {
    text: String,
    #[serde(default)]
    token_logprobs: Vec<f64>,
    #[serde(default)]
    model: Option<String>,
}

/// Completion client for an OpenAI-style `POST {endpoint}/v1/completions`.
pub struct HttpLlmProvider {
    config: HttpConfig,
    client: reqwest::blocking::Client,
    semaphore: Semaphore,
    stats: TransportStats,
}

impl HttpLlmProvider {
    pub fn new(config: HttpConfig) -> Result<Self> {
        config.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::provider(ProviderErrorKind::Transport, e.to_string()))?;
        let semaphore = Semaphore::new(config.max_concurrency);
        Ok(HttpLlmProvider {
            config,
            client,
            semaphore,
            stats: TransportStats::default(),
        })
    }

    pub fn stats(&self) -> TransportSnapshot {
        self.stats.snapshot()
    }

    fn url(&self) -> String {
        format!(
            "{}/v1/completions",
            self.config.endpoint.trim_end_matches('/')
        )
    }
}

fn excerpt(body: &str) -> &str {
    let end = body
        .char_indices()
        .nth(200)
        .map_or(body.len(), |(i, _)| i);
    body[..end].trim()
}

impl LlmProvider for HttpLlmProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion> {
        request.validate()?;
        let wire = WireCompletionRequest {
            model: &self.config.model,
            prompt: &request.prompt,
            max_tokens: request.max_tokens,
            temperature: request.temperature,
            seed: request.seed,
        };
        let _permit = self.semaphore.acquire();
        let started = Instant::now();
        let parsed: WireCompletionResponse = with_retry(&self.config.retry, &self.stats, || {
            let response = self
                .client
                .post(self.url())
                .bearer_auth(&self.config.token)
                .json(&wire)
                .send()
                .map_err(|e| classify_request_error(&e))?;
            let status = response.status().as_u16();
            if !(200..300).contains(&status) {
                let body = response.text().unwrap_or_default();
                return Err(classify_status(status, excerpt(&body)));
            }
            let body = response
                .text()
                .map_err(|e| classify_request_error(&e))?;
            serde_json::from_str(&body).map_err(|e| {
                Error::provider(
                    ProviderErrorKind::Malformed,
                    format!("completion payload: {e}"),
                )
            })
        })?;
        Ok(Completion {
            text: parsed.text,
            token_logprobs: parsed.token_logprobs,
            model: parsed.model.unwrap_or_else(|| self.config.model.clone()),
            latency_ms: started.elapsed().as_millis() as u64,
        })
    }

    fn model(&self) -> &str {
        &self.config.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_response_wins_over_fallback() {
        let mock = MockLlm::new(7).respond("capital of France", "Paris.");
        let req = CompletionRequest::new("What is the capital of France?");
        let out = mock.complete(&req).unwrap();
        assert_eq!(out.text, "Paris.");
        assert_eq!(out.latency_ms, 0);
    }

    #[test]
    fn script_entries_match_in_order() {
        let mock = MockLlm::new(7)
            .respond("France", "first")
            .respond("capital of France", "second");
        let out = mock
            .complete(&CompletionRequest::new("capital of France"))
            .unwrap();
        assert_eq!(out.text, "first");
    }

    #[test]
    fn fallback_is_deterministic_per_seed_and_prompt() {
        let a = MockLlm::new(7);
        let b = MockLlm::new(7);
        let c = MockLlm::new(8);
        let req = CompletionRequest::new("anything");
        let ta = a.complete(&req).unwrap().text;
        let tb = b.complete(&req).unwrap().text;
        let tc = c.complete(&req).unwrap().text;
        assert_eq!(ta, tb);
        assert_ne!(ta, tc);

        let other = a.complete(&CompletionRequest::new("different")).unwrap();
        assert_ne!(ta, other.text);
    }

    #[test]
    fn logprobs_cover_whitespace_tokens_and_stay_non_positive() {
        let mock = MockLlm::new(1).respond("q", "three token answer");
        let out = mock.complete(&CompletionRequest::new("q")).unwrap();
        assert_eq!(out.token_logprobs.len(), 3);
        for lp in &out.token_logprobs {
            assert!((-5.0..=0.0).contains(lp), "logprob out of range: {lp}");
        }
    }

    #[test]
    fn prompts_are_recorded_in_call_order() {
        let mock = MockLlm::new(1);
        mock.complete(&CompletionRequest::new("first")).unwrap();
        mock.complete(&CompletionRequest::new("second")).unwrap();
        assert_eq!(mock.received_prompts(), vec!["first", "second"]);
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let mock = MockLlm::new(1);
        let mut req = CompletionRequest::new("p");
        req.max_tokens = 0;
        assert!(mock.complete(&req).is_err());

        let mut req = CompletionRequest::new("p");
        req.temperature = -0.5;
        assert!(mock.complete(&req).is_err());
    }

    #[test]
    fn http_provider_rejects_empty_token_without_connecting() {
        let cfg = HttpConfig::new("http://127.0.0.1:9", "", "m");
        let err = match HttpLlmProvider::new(cfg) {
            Ok(_) => panic!("empty credential accepted"),
            Err(e) => e,
        };
        assert_eq!(err.provider_kind(), Some(ProviderErrorKind::Auth));
    }
}
