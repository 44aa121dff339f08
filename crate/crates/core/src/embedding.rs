//! Embedding providers and vector similarity.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, ProviderErrorKind, Result};
use crate::transport::{
    classify_request_error, classify_status, with_retry, HttpConfig, Semaphore, TransportSnapshot,
    TransportStats,
};

/// A dense embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(pub Vec<f64>);

/// Per-token embeddings for one text, in token order.
pub type TokenEmbeddings = Vec<EmbeddingVector>;

impl EmbeddingVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &EmbeddingVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<EmbeddingVector> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(EmbeddingVector(self.0.iter().map(|x| x / norm).collect()))
    }
}

/// Cosine similarity, clamped to `[-1, 1]` against rounding drift.
///
/// Zero vectors and dimension mismatches are errors.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    let dot = a.dot(b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, text: &str) -> Result<EmbeddingVector>;

    fn embed_tokens(&self, tokens: &[String]) -> Result<TokenEmbeddings> {
        tokens.iter().map(|t| self.embed(t)).collect()
    }
}

/// Deterministic offline embedder.
///
/// Unknown texts map to a unit vector drawn from a ChaCha stream keyed by a
/// hash of the seed and the text, so the same text always lands on the same
/// point. Specific texts can be pinned to chosen vectors, and
/// [`MockEmbedding::force_similarity`] pins a text so that its cosine against
/// an anchor text comes out at a requested value.
pub struct MockEmbedding {
    seed: u64,
    dim: usize,
    overrides: Mutex<HashMap<String, EmbeddingVector>>,
}

impl MockEmbedding {
    pub fn new(seed: u64) -> Self {
        MockEmbedding {
            seed,
            dim: 16,
            overrides: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        assert!(dim >= 2, "mock embeddings need at least two dimensions");
        self.dim = dim;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Pin `text` to an explicit vector.
    pub fn set_override(&self, text: impl Into<String>, vector: EmbeddingVector) {
        self.overrides.lock().unwrap().insert(text.into(), vector);
    }

    fn pseudo_vector(&self, text: &str, salt: u8) -> EmbeddingVector {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update([salt]);
        hasher.update(text.as_bytes());
        let digest: [u8; 32] = hasher.finalize().into();
        let mut rng = ChaCha8Rng::from_seed(digest);
        loop {
            let candidate =
                EmbeddingVector((0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect());
            if let Ok(unit) = candidate.normalized() {
                return unit;
            }
        }
    }

    /// Pin `text` so that `cosine_similarity(embed(anchor), embed(text))`
    /// equals `similarity`. The anchor keeps its current embedding.
    pub fn force_similarity(&self, anchor: &str, text: &str, similarity: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&similarity) {
            return Err(Error::InvalidConfig(format!(
                "similarity must lie in [-1, 1], got {similarity}"
            )));
        }
        let axis = self.embed(anchor)?.normalized()?;
        // Gram-Schmidt: find a unit vector orthogonal to the anchor.
        let mut orthogonal = None;
        for salt in 1..=8 {
            let raw = self.pseudo_vector(text, salt);
            let along = raw.dot(&axis)?;
            let rejected = EmbeddingVector(
                raw.0
                    .iter()
                    .zip(&axis.0)
                    .map(|(r, a)| r - along * a)
                    .collect(),
            );
            if rejected.norm() > 1e-9 {
                orthogonal = Some(rejected.normalized()?);
                break;
            }
        }
        let orthogonal = orthogonal.ok_or(Error::ZeroVector)?;
        let residual = (1.0 - similarity * similarity).max(0.0).sqrt();
        let pinned = EmbeddingVector(
            axis.0
                .iter()
                .zip(&orthogonal.0)
                .map(|(a, o)| similarity * a + residual * o)
                .collect(),
        );
        self.set_override(text, pinned);
        Ok(())
    }
}

impl EmbeddingProvider for MockEmbedding {
    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        if let Some(pinned) = self.overrides.lock().unwrap().get(text) {
            return Ok(pinned.clone());
        }
        Ok(self.pseudo_vector(text, 0))
    }
}

#[derive(Serialize)]
struct WireEmbeddingRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Deserialize)]
struct WireEmbeddingResponse {
    embedding: Vec<f64>,
}

/// Embedding client for `POST {endpoint}/v1/embeddings`.
pub struct HttpEmbeddingProvider {
    config: HttpConfig,
    client: reqwest::blocking::Client,
    semaphore: Semaphore,
    stats: TransportStats,
}

impl HttpEmbeddingProvider {
    pub fn new(config: HttpConfig) -> Result<Self> {
        config.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::provider(ProviderErrorKind::Transport, e.to_string()))?;
        let semaphore = Semaphore::new(config.max_concurrency);
        Ok(HttpEmbeddingProvider {
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
            "{}/v1/embeddings",
            self.config.endpoint.trim_end_matches('/')
        )
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        let wire = WireEmbeddingRequest {
            model: &self.config.model,
            input: text,
        };
        let _permit = self.semaphore.acquire();
        let parsed: WireEmbeddingResponse = with_retry(&self.config.retry, &self.stats, || {
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
                return Err(classify_status(status, body.trim()));
            }
            let body = response
                .text()
                .map_err(|e| classify_request_error(&e))?;
            serde_json::from_str(&body).map_err(|e| {
                Error::provider(
                    ProviderErrorKind::Malformed,
                    format!("embedding payload: {e}"),
                )
            })
        })?;
        if parsed.embedding.is_empty() {
            return Err(Error::provider(
                ProviderErrorKind::Malformed,
                "embedding payload: empty vector",
            ));
        }
        Ok(EmbeddingVector(parsed.embedding))
    }
}
