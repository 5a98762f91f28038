//! Request execution against an endpoint, a replay directory, or nothing.
//!
//! The endpoint string selects the backend: `http://` and `https://` hit a
//! generic chat-completion API; `replay:DIR` serves canned responses from
//! `DIR/{doc_id}.txt` for offline runs. Every successful response lands in
//! the cache, and cache hits never touch the backend, which
//! [`Executor::backend_calls`] makes observable.
//!
//! Transient failures (network errors, timeouts, HTTP 429/5xx) retry with
//! exponential backoff; `max_retries` bounds the extra attempts. Endpoints
//! that reject the temperature parameter with a 400 get one follow-up
//! request without it, per the stated evaluation policy of keeping such
//! models on their default configuration.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use thiserror::Error;

use super::cache::{cache_key, ResponseCache};
use super::ModelConfig;

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },
    #[error("endpoint returned HTTP {status}: {body}")]
    HttpError { status: u16, body: String },
    #[error("retries exhausted after {attempts} attempt(s): {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("environment variable {var} for the API key is unset")]
    MissingApiKey { var: String },
    #[error("no replayable response for document '{doc_id}'")]
    ReplayMiss { doc_id: String },
    #[error("unusable endpoint '{endpoint}': {reason}")]
    InvalidEndpoint { endpoint: String, reason: String },
    #[error("could not extract response text: {reason}")]
    BadResponse { reason: String },
    #[error("cache I/O at {path}: {source}")]
    Cache {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// One executed (or cache-served) response.
#[derive(Debug, Clone)]
pub struct Fetched {
    pub text: String,
    pub cached: bool,
    pub cache_key: String,
}

#[derive(Debug)]
enum Backend {
    Http { client: reqwest::blocking::Client },
    Replay { dir: PathBuf },
}

#[derive(Debug)]
pub struct Executor {
    cfg: ModelConfig,
    backend: Backend,
    cache: ResponseCache,
    cache_dir: PathBuf,
    backend_calls: AtomicU64,
}

impl Executor {
    /// Builds an executor for an `http(s)://` or `replay:` endpoint.
    pub fn new(cfg: &ModelConfig, cache_dir: &Path) -> Result<Executor, ExecError> {
        let backend = if cfg.endpoint.starts_with("http://") || cfg.endpoint.starts_with("https://")
        {
            let client = reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(cfg.timeout_secs))
                .build()
                .map_err(|e| ExecError::InvalidEndpoint {
                    endpoint: cfg.endpoint.clone(),
                    reason: e.to_string(),
                })?;
            Backend::Http { client }
        } else if let Some(dir) = cfg.endpoint.strip_prefix("replay:") {
            Backend::Replay {
                dir: PathBuf::from(dir),
            }
        } else {
            return Err(ExecError::InvalidEndpoint {
                endpoint: cfg.endpoint.clone(),
                reason: "expected http://, https://, or replay:DIR".to_owned(),
            });
        };
        let cache = ResponseCache::open(cache_dir).map_err(|source| ExecError::Cache {
            path: cache_dir.to_owned(),
            source,
        })?;
        Ok(Executor {
            cfg: cfg.clone(),
            backend,
            cache,
            cache_dir: cache_dir.to_owned(),
            backend_calls: AtomicU64::new(0),
        })
    }

    /// Backend invocations so far; cache hits do not count.
    pub fn backend_calls(&self) -> u64 {
        self.backend_calls.load(Ordering::SeqCst)
    }

    pub fn execute(&self, doc_id: &str, prompt: &str) -> Result<Fetched, ExecError> {
        let key = cache_key(&self.cfg.name, prompt);
        if let Some(text) = self.cache.load(&key) {
            return Ok(Fetched {
                text,
                cached: true,
                cache_key: key,
            });
        }
        self.backend_calls.fetch_add(1, Ordering::SeqCst);
        let text = match &self.backend {
            Backend::Http { client } => self.fetch_http(client, prompt)?,
            Backend::Replay { dir } => {
                let path = dir.join(format!("{doc_id}.txt"));
                std::fs::read_to_string(&path).map_err(|_| ExecError::ReplayMiss {
                    doc_id: doc_id.to_owned(),
                })?
            }
        };
        self.cache
            .store(&key, &text)
            .map_err(|source| ExecError::Cache {
                path: self.cache_dir.clone(),
                source,
            })?;
        Ok(Fetched {
            text,
            cached: false,
            cache_key: key,
        })
    }

    fn request_body(&self, prompt: &str, with_temperature: bool) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": self.cfg.name,
            "messages": [{"role": "user", "content": prompt}],
        });
        if with_temperature {
            body["temperature"] = serde_json::json!(self.cfg.temperature);
        }
        if let Some(max) = self.cfg.max_output_tokens {
            body["max_tokens"] = serde_json::json!(max);
        }
        body
    }

    fn fetch_http(
        &self,
        client: &reqwest::blocking::Client,
        prompt: &str,
    ) -> Result<String, ExecError> {
        let api_key = match &self.cfg.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| ExecError::MissingApiKey {
                var: var.clone(),
            })?),
            None => None,
        };
        let mut with_temperature = true;
        let mut attempts = 0u32;

        loop {
            let mut req = client
                .post(&self.cfg.endpoint)
                .json(&self.request_body(prompt, with_temperature));
            if let Some(key) = &api_key {
                req = req
                    .header("Authorization", format!("Bearer {key}"))
                    .header("x-api-key", key.clone());
            }
            attempts += 1;
            let (failure, was_timeout) = match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    let body = resp.text().unwrap_or_default();
                    if status.is_success() {
                        return extract_content(&body);
                    }
                    // A 400 blaming the temperature parameter gets one
                    // plain retry with the parameter omitted.
                    if status.as_u16() == 400
                        && with_temperature
                        && body.to_lowercase().contains("temperature")
                    {
                        log::warn!(
                            "endpoint rejected the temperature parameter, retrying without it"
                        );
                        with_temperature = false;
                        continue;
                    }
                    let retryable = status.as_u16() == 429 || status.is_server_error();
                    if !retryable {
                        return Err(ExecError::HttpError {
                            status: status.as_u16(),
                            body: truncate(&body),
                        });
                    }
                    (format!("HTTP {}", status.as_u16()), false)
                }
                Err(e) => {
                    let was_timeout = e.is_timeout();
                    let failure = if was_timeout {
                        "timeout".to_owned()
                    } else {
                        e.to_string()
                    };
                    (failure, was_timeout)
                }
            };
            if attempts > self.cfg.max_retries {
                return Err(if was_timeout {
                    ExecError::Timeout { attempts }
                } else {
                    ExecError::RetriesExhausted {
                        attempts,
                        last: failure,
                    }
                });
            }
            let backoff = Duration::from_millis(250u64 << (attempts - 1).min(4));
            std::thread::sleep(backoff);
        }
    }
}

/// Pulls the assistant text out of the common chat-completion shapes.
fn extract_content(body: &str) -> Result<String, ExecError> {
    let json: serde_json::Value =
        serde_json::from_str(body).map_err(|e| ExecError::BadResponse {
            reason: format!("response is not JSON: {e}"),
        })?;
    let candidates = [
        &json["choices"][0]["message"]["content"],
        &json["choices"][0]["text"],
        &json["content"][0]["text"],
        &json["output_text"],
    ];
    for c in candidates {
        if let Some(s) = c.as_str() {
            return Ok(s.to_owned());
        }
    }
    Err(ExecError::BadResponse {
        reason: "no content field in response".to_owned(),
    })
}

fn truncate(body: &str) -> String {
    const MAX: usize = 200;
    if body.chars().count() <= MAX {
        body.to_owned()
    } else {
        let cut: String = body.chars().take(MAX).collect();
        format!("{cut}...")
    }
}
