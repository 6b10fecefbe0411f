//! JSON-over-HTTP completion backend.
//!
//! Speaks a minimal prompt-in/text-out shape: POST the serialized
//! [`CompletionRequest`] to the configured URL and read `{"text": ...}`
//! back (an OpenAI-style `{"choices":[{"text": ...}]}` body is also
//! accepted). The bearer token comes from an environment variable so keys
//! never live in config files.

use std::time::Duration;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Backend, CompletionRequest};

/// Environment variable holding the API key.
pub const API_KEY_ENV: &str = "INDUCT_API_KEY";

pub struct HttpBackend {
    url: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct Choice {
    text: String,
}

#[derive(Deserialize)]
struct CompletionBody {
    text: Option<String>,
    choices: Option<Vec<Choice>>,
}

impl HttpBackend {
    pub fn new(url: impl Into<String>) -> Result<HttpBackend> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| Error::Backend {
                backend: "http".into(),
                message: e.to_string(),
            })?;
        Ok(HttpBackend {
            url: url.into(),
            api_key: std::env::var(API_KEY_ENV).ok(),
            client,
        })
    }

    fn transient(message: String, retry_after_ms: Option<u64>) -> Error {
        Error::BackendTransient {
            backend: "http".into(),
            message,
            retry_after_ms,
        }
    }
}

impl Backend for HttpBackend {
    fn id(&self) -> &str {
        "http"
    }

    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        let mut builder = self.client.post(&self.url).json(req);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder
            .send()
            .map_err(|e| Self::transient(e.to_string(), None))?;

        let status = response.status();
        if status == reqwest::StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            // Rate-limit and server errors are retryable; honor Retry-After.
            let retry_after_ms = response
                .headers()
                .get(reqwest::header::RETRY_AFTER)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.parse::<u64>().ok())
                .map(|secs| secs * 1000);
            return Err(Self::transient(format!("HTTP {status}"), retry_after_ms));
        }
        if !status.is_success() {
            return Err(Error::Backend {
                backend: "http".into(),
                message: format!("HTTP {status}"),
            });
        }
        let body: CompletionBody = response.json().map_err(|e| Error::Backend {
            backend: "http".into(),
            message: format!("bad response body: {e}"),
        })?;
        body.text
            .or_else(|| body.choices.and_then(|mut c| c.pop()).map(|c| c.text))
            .ok_or_else(|| Error::Backend {
                backend: "http".into(),
                message: "response carries neither 'text' nor 'choices'".into(),
            })
    }
}
