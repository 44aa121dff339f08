//! Shared plumbing for HTTP-backed providers: retry with exponential backoff,
//! a counting semaphore for in-flight request limits, and call accounting.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use rand::Rng;

use crate::error::{Error, ProviderErrorKind, Result};

/// Exponential backoff schedule for retryable provider failures.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    /// Total attempts per call, the first one included.
    pub max_attempts: u32,
    /// Delay before the first retry; doubles on each subsequent retry.
    pub base_delay: Duration,
    /// Fraction of the delay used as symmetric jitter (0.5 means ±50%).
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            jitter: 0.5,
        }
    }
}

impl RetryPolicy {
    /// The sleep before retry number `retry` (0-based), jitter applied.
    pub fn delay(&self, retry: u32) -> Duration {
        let base = self.base_delay.as_secs_f64() * f64::from(2u32.pow(retry));
        if base == 0.0 {
            return Duration::ZERO;
        }
        let factor = if self.jitter > 0.0 {
            1.0 + rand::rng().random_range(-self.jitter..=self.jitter)
        } else {
            1.0
        };
        Duration::from_secs_f64(base * factor.max(0.0))
    }
}

/// Cumulative counters for one provider instance.
#[derive(Debug, Default)]
pub struct TransportStats {
    calls: AtomicU64,
    attempts: AtomicU64,
    retries: AtomicU64,
}

/// Point-in-time copy of [`TransportStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportSnapshot {
    /// Logical provider calls issued.
    pub calls: u64,
    /// HTTP attempts, retries included.
    pub attempts: u64,
    /// Attempts beyond the first, summed over all calls.
    pub retries: u64,
}

impl TransportStats {
    pub fn snapshot(&self) -> TransportSnapshot {
        TransportSnapshot {
            calls: self.calls.load(Ordering::Relaxed),
            attempts: self.attempts.load(Ordering::Relaxed),
            retries: self.retries.load(Ordering::Relaxed),
        }
    }
}

/// Run `op` under `policy`, sleeping between retryable failures.
///
/// Auth and malformed-response errors abort immediately; rate limits,
/// timeouts, and transport failures retry until the attempt budget runs out.
pub fn with_retry<T>(
    policy: &RetryPolicy,
    stats: &TransportStats,
    mut op: impl FnMut() -> Result<T>,
) -> Result<T> {
    stats.calls.fetch_add(1, Ordering::Relaxed);
    let mut attempt: u32 = 0;
    loop {
        attempt += 1;
        stats.attempts.fetch_add(1, Ordering::Relaxed);
        match op() {
            Ok(value) => return Ok(value),
            Err(err) => {
                let retryable = err
                    .provider_kind()
                    .is_some_and(ProviderErrorKind::is_retryable);
                if !retryable || attempt >= policy.max_attempts {
                    return Err(err);
                }
                stats.retries.fetch_add(1, Ordering::Relaxed);
                let delay = policy.delay(attempt - 1);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
            }
        }
    }
}

/// Counting semaphore bounding concurrent in-flight requests.
pub struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

impl Semaphore {
    pub fn new(permits: usize) -> Self {
        assert!(permits > 0, "semaphore needs at least one permit");
        Semaphore {
            permits: Mutex::new(permits),
            available: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> SemaphorePermit<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        SemaphorePermit { semaphore: self }
    }
}

pub struct SemaphorePermit<'a> {
    semaphore: &'a Semaphore,
}

impl Drop for SemaphorePermit<'_> {
    fn drop(&mut self) {
        let mut permits = self.semaphore.permits.lock().unwrap();
        *permits += 1;
        self.semaphore.available.notify_one();
    }
}

/// Map an HTTP status to a provider error.
pub fn classify_status(status: u16, body_excerpt: &str) -> Error {
    let kind = match status {
        401 | 403 => ProviderErrorKind::Auth,
        429 => ProviderErrorKind::RateLimited,
        500..=599 => ProviderErrorKind::Transport,
        _ => ProviderErrorKind::Malformed,
    };
    Error::provider(kind, format!("status {status}: {body_excerpt}"))
}

/// Map a reqwest transport failure to a provider error.
pub fn classify_request_error(err: &reqwest::Error) -> Error {
    let kind = if err.is_timeout() {
        ProviderErrorKind::Timeout
    } else if err.is_decode() {
        ProviderErrorKind::Malformed
    } else {
        ProviderErrorKind::Transport
    };
    Error::provider(kind, err.to_string())
}

/// Connection settings shared by the HTTP providers.
#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub endpoint: String,
    pub token: String,
    pub model: String,
    pub timeout: Duration,
    pub max_concurrency: usize,
    pub retry: RetryPolicy,
}

impl HttpConfig {
    pub fn new(
        endpoint: impl Into<String>,
        token: impl Into<String>,
        model: impl Into<String>,
    ) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            token: token.into(),
            model: model.into(),
            timeout: Duration::from_secs(30),
            max_concurrency: 4,
            retry: RetryPolicy::default(),
        }
    }

    /// Reject configurations that could never issue a valid request.
    pub fn validate(&self) -> Result<()> {
        if self.endpoint.trim().is_empty() {
            return Err(Error::InvalidConfig("provider endpoint is empty".into()));
        }
        if self.token.trim().is_empty() {
            return Err(Error::provider(
                ProviderErrorKind::Auth,
                "credential is empty; refusing to send unauthenticated requests",
            ));
        }
        if self.max_concurrency == 0 {
            return Err(Error::InvalidConfig(
                "max_concurrency must be positive".into(),
            ));
        }
        Ok(())
    }
}
