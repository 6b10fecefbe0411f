//! Uniform completion-model access.
//!
//! A [`Backend`] turns a prompt into a completion string. The
//! [`ModelClient`] wraps a backend with a retry policy and an optional
//! persistent [`Cache`]; cache hits never touch the backend.

mod cache;
mod http;
mod oracle;

pub use cache::{cache_key, Cache};
pub use http::HttpBackend;
pub use oracle::OracleBackend;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default max_tokens for instruction induction (instructions are a
/// sentence).
pub const MAX_TOKENS_INDUCTION: u32 = 64;
/// Default max_tokens for task execution answers.
pub const MAX_TOKENS_EXECUTION: u32 = 32;
/// Default stop sequence for execution prompts, so the model does not
/// continue with invented demonstrations.
pub const EXECUTION_STOP: &str = "\nInput:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_tokens: u32,
    /// 0 means greedy decoding, the harness default.
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stop: Vec<String>,
    pub model_name: String,
}

impl CompletionRequest {
    pub fn greedy(
        prompt: impl Into<String>,
        model_name: impl Into<String>,
        max_tokens: u32,
    ) -> Self {
        CompletionRequest {
            prompt: prompt.into(),
            max_tokens,
            temperature: 0.0,
            stop: Vec::new(),
            model_name: model_name.into(),
        }
    }

    pub fn with_stop(mut self, stop: &str) -> Self {
        self.stop.push(stop.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResponse {
    /// May be empty; metrics score empty completions as 0.
    pub text: String,
    pub backend: String,
    pub cached: bool,
    pub latency_ms: u64,
}

/// A completion backend. Implementations must be safe to call from
/// multiple threads at once.
pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, req: &CompletionRequest) -> Result<String>;
}

/// Retry with exponential backoff on transient failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay_ms: 500,
            max_delay_ms: 8_000,
        }
    }
}

impl RetryPolicy {
    /// No retries and no sleeping; used by offline backends and tests.
    pub fn none() -> Self {
        RetryPolicy {
            max_retries: 0,
            base_delay_ms: 0,
            max_delay_ms: 0,
        }
    }

    fn delay(&self, attempt: u32, server_hint_ms: Option<u64>) -> Duration {
        let backoff = self
            .base_delay_ms
            .saturating_mul(1u64 << attempt.min(16))
            .min(self.max_delay_ms);
        Duration::from_millis(server_hint_ms.unwrap_or(backoff).min(self.max_delay_ms))
    }
}

/// Backend plus cache plus retry policy: the single entry point every
/// experiment uses to talk to a model.
pub struct ModelClient {
    backend: Arc<dyn Backend>,
    cache: Option<Cache>,
    retry: RetryPolicy,
}

impl ModelClient {
    pub fn new(backend: Arc<dyn Backend>) -> ModelClient {
        ModelClient {
            backend,
            cache: None,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_cache(mut self, cache: Cache) -> ModelClient {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> ModelClient {
        self.retry = retry;
        self
    }

    pub fn backend_id(&self) -> &str {
        self.backend.id()
    }

    /// Complete a request. Cache hits return the stored text without a
    /// backend call; misses call the backend (with retries on transient
    /// failures), store the result, and return it.
    pub fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse> {
        let start = Instant::now();
        let key = cache_key(self.backend.id(), req);
        if let Some(cache) = &self.cache {
            if let Some(text) = cache.get(&key) {
                return Ok(CompletionResponse {
                    text,
                    backend: self.backend.id().to_string(),
                    cached: true,
                    latency_ms: start.elapsed().as_millis() as u64,
                });
            }
        }

        let mut attempt = 0u32;
        let text = loop {
            match self.backend.complete(req) {
                Ok(text) => break text,
                Err(Error::BackendTransient {
                    backend,
                    message,
                    retry_after_ms,
                }) => {
                    if attempt >= self.retry.max_retries {
                        return Err(Error::Backend {
                            backend,
                            message: format!("gave up after {attempt} retries: {message}"),
                        });
                    }
                    std::thread::sleep(self.retry.delay(attempt, retry_after_ms));
                    attempt += 1;
                }
                Err(other) => return Err(other),
            }
        };

        if let Some(cache) = &self.cache {
            cache.put(&key, req, &text)?;
        }
        Ok(CompletionResponse {
            text,
            backend: self.backend.id().to_string(),
            cached: false,
            latency_ms: start.elapsed().as_millis() as u64,
        })
    }
}

/// Backend returning a fixed completion; stands in for an induction model
/// in scripted pipelines.
pub struct StaticBackend {
    pub text: String,
}

impl StaticBackend {
    pub fn new(text: impl Into<String>) -> StaticBackend {
        StaticBackend { text: text.into() }
    }
}

impl Backend for StaticBackend {
    fn id(&self) -> &str {
        "static"
    }

    fn complete(&self, _req: &CompletionRequest) -> Result<String> {
        Ok(self.text.clone())
    }
}

/// Wraps a backend and counts calls plus the peak number of simultaneous
/// in-flight calls; the cache and parallelism contracts are verified
/// through it.
pub struct CountingBackend<B> {
    inner: B,
    calls: AtomicUsize,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
}

impl<B: Backend> CountingBackend<B> {
    pub fn new(inner: B) -> CountingBackend<B> {
        CountingBackend {
            inner,
            calls: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn peak_in_flight(&self) -> usize {
        self.peak_in_flight.load(Ordering::SeqCst)
    }
}

impl<B: Backend> Backend for CountingBackend<B> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        let result = self.inner.complete(req);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        result
    }
}

/// Apply `f` to every item with at most `limit` invocations in flight at
/// once. Results come back in item order regardless of completion order.
pub fn map_bounded<T, R, F>(items: &[T], limit: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let limit = limit.max(1).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<R>> = Vec::new();
    results.resize_with(items.len(), || None);
    let slots = std::sync::Mutex::new(&mut results);

    std::thread::scope(|scope| {
        for _ in 0..limit {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });

    results
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct FlakyBackend {
        failures_left: AtomicUsize,
    }

    impl Backend for FlakyBackend {
        fn id(&self) -> &str {
            "flaky"
        }

        fn complete(&self, _req: &CompletionRequest) -> Result<String> {
            if self
                .failures_left
                .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
                .is_ok()
            {
                Err(Error::BackendTransient {
                    backend: "flaky".into(),
                    message: "simulated outage".into(),
                    retry_after_ms: Some(0),
                })
            } else {
                Ok("ok".into())
            }
        }
    }

    #[test]
    fn retries_recover_from_transient_failures() {
        let client = ModelClient::new(Arc::new(FlakyBackend {
            failures_left: AtomicUsize::new(2),
        }))
        .with_retry(RetryPolicy {
            max_retries: 3,
            base_delay_ms: 0,
            max_delay_ms: 0,
        });
        let resp = client
            .complete(&CompletionRequest::greedy("p", "m", 8))
            .unwrap();
        assert_eq!(resp.text, "ok");
        assert!(!resp.cached);
    }

    #[test]
    fn retries_give_up_past_the_cap() {
        let client = ModelClient::new(Arc::new(FlakyBackend {
            failures_left: AtomicUsize::new(99),
        }))
        .with_retry(RetryPolicy {
            max_retries: 2,
            base_delay_ms: 0,
            max_delay_ms: 0,
        });
        let err = client
            .complete(&CompletionRequest::greedy("p", "m", 8))
            .unwrap_err();
        assert_eq!(err.category(), "backend");
    }

    #[test]
    fn cache_hit_skips_the_backend_and_marks_the_response() {
        let dir = tempfile::tempdir().unwrap();
        let backend = Arc::new(CountingBackend::new(StaticBackend::new(" 9")));
        let client = ModelClient::new(backend.clone())
            .with_cache(Cache::open(&dir.path().join("cache.jsonl")).unwrap());
        let req = CompletionRequest::greedy("p", "m", 8);

        let first = client.complete(&req).unwrap();
        assert!(!first.cached);
        let second = client.complete(&req).unwrap();
        assert!(second.cached);
        assert_eq!(second.text, first.text);
        assert_eq!(
            backend.calls(),
            1,
            "second completion must not call the backend"
        );
    }

    /// Backend whose first `quorum` calls block until all of them are in
    /// flight at once, proving real overlap without timing assumptions;
    /// the gate then stays open.
    struct RendezvousBackend {
        arrivals: std::sync::Mutex<usize>,
        opened: std::sync::Condvar,
        quorum: usize,
    }

    impl Backend for RendezvousBackend {
        fn id(&self) -> &str {
            "rendezvous"
        }

        fn complete(&self, _req: &CompletionRequest) -> Result<String> {
            let mut arrived = self.arrivals.lock().unwrap();
            *arrived += 1;
            if *arrived >= self.quorum {
                self.opened.notify_all();
            } else {
                let quorum = self.quorum;
                let (_guard, timeout) = self
                    .opened
                    .wait_timeout_while(arrived, std::time::Duration::from_secs(5), |a| *a < quorum)
                    .unwrap();
                assert!(!timeout.timed_out(), "workers never overlapped");
            }
            Ok("x".into())
        }
    }

    #[test]
    fn bounded_map_preserves_order_and_limit() {
        let backend = CountingBackend::new(RendezvousBackend {
            arrivals: std::sync::Mutex::new(0),
            opened: std::sync::Condvar::new(),
            quorum: 4,
        });
        let items: Vec<u32> = (0..48).collect();
        let results = map_bounded(&items, 4, |i| {
            backend
                .complete(&CompletionRequest::greedy(i.to_string(), "m", 1))
                .map(|t| (*i, t))
                .unwrap()
        });
        assert_eq!(results.len(), 48);
        for (i, (item, _)) in results.iter().enumerate() {
            assert_eq!(*item, i as u32);
        }
        assert_eq!(backend.calls(), 48);
        // The rendezvous forces four-way overlap; the limit caps it there.
        assert_eq!(backend.peak_in_flight(), 4);
    }
}
