//! Model backends: a deterministic cue-lemma mock and a chat-completions HTTP client.
//!
//! HTTP wire format (version 1): `POST {base_url}/chat/completions` with body
//! `{"model": .., "messages": [{"role": "user", "content": <prompt>}], "temperature": ..,
//! "max_tokens": ..}`; the answer is read from `choices[0].message.content`.

use std::collections::BTreeSet;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{SentimentLabel, TaskInstance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct BackendError(pub String);

pub trait Backend: Send + Sync {
    /// Name recorded in every prediction.
    fn name(&self) -> String;

    /// Raw model output for one instance.
    fn complete(&self, instance: &TaskInstance, prompt: &str) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Http,
    #[default]
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub concurrency: usize,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub backoff_base_ms: u64,
    pub backoff_factor: u32,
    pub positive_cues: Vec<String>,
    pub negative_cues: Vec<String>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Mock,
            base_url: None,
            model: None,
            temperature: 0.0,
            max_tokens: 16,
            timeout_secs: 60,
            max_retries: 5,
            concurrency: 4,
            api_key_env: None,
            backoff_base_ms: 1000,
            backoff_factor: 2,
            positive_cues: Vec::new(),
            negative_cues: Vec::new(),
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<()> {
        if self.concurrency == 0 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(Error::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        match self.kind {
            BackendKind::Http => {
                if self.base_url.as_deref().is_none_or(str::is_empty) {
                    return Err(Error::Config("http backend requires base_url".into()));
                }
                if self.model.as_deref().is_none_or(str::is_empty) {
                    return Err(Error::Config("http backend requires model".into()));
                }
                if self.timeout_secs == 0 {
                    return Err(Error::Config("timeout must be positive".into()));
                }
            }
            BackendKind::Mock => {
                CueRules::new(self.positive_cues.clone(), self.negative_cues.clone())?;
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Box<dyn Backend>> {
        self.validate()?;
        Ok(match self.kind {
            BackendKind::Mock => Box::new(MockBackend::new(CueRules::new(
                self.positive_cues.clone(),
                self.negative_cues.clone(),
            )?)),
            BackendKind::Http => Box::new(HttpBackend::new(self)?),
        })
    }
}

/// Disjoint positive and negative cue lemma sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueRules {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl CueRules {
    pub fn new(
        positive: impl IntoIterator<Item = String>,
        negative: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let positive: BTreeSet<String> = positive.into_iter().collect();
        let negative: BTreeSet<String> = negative.into_iter().collect();
        let overlap: Vec<&String> = positive.intersection(&negative).collect();
        if !overlap.is_empty() {
            return Err(Error::Config(format!(
                "cue lemmas both positive and negative: {overlap:?}"
            )));
        }
        Ok(CueRules { positive, negative })
    }
}

/// Negative if any negative cue lemma is in the window, else positive on a positive cue,
/// else neutral.
pub fn mock_classify(instance: &TaskInstance, cues: &CueRules) -> SentimentLabel {
    if instance.lemmas.iter().any(|l| cues.negative.contains(l)) {
        SentimentLabel::Negative
    } else if instance.lemmas.iter().any(|l| cues.positive.contains(l)) {
        SentimentLabel::Positive
    } else {
        SentimentLabel::Neutral
    }
}

#[derive(Debug, Clone)]
pub struct MockBackend {
    cues: CueRules,
}

impl MockBackend {
    pub fn new(cues: CueRules) -> Self {
        MockBackend { cues }
    }
}

impl Backend for MockBackend {
    fn name(&self) -> String {
        "mock".into()
    }

    fn complete(&self, instance: &TaskInstance, _prompt: &str) -> Result<String, BackendError> {
        Ok(mock_classify(instance, &self.cues).symbol().to_string())
    }
}

pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    max_retries: u32,
    backoff_base: Duration,
    backoff_factor: u32,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(config: &BackendConfig) -> Result<Self> {
        let api_key = match &config.api_key_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| Error::Config(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        let base = config
            .base_url
            .as_deref()
            .unwrap_or_default()
            .trim_end_matches('/');
        Ok(HttpBackend {
            client,
            endpoint: format!("{base}/chat/completions"),
            model: config.model.clone().unwrap_or_default(),
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            max_retries: config.max_retries,
            backoff_base: Duration::from_millis(config.backoff_base_ms),
            backoff_factor: config.backoff_factor.max(1),
            api_key,
        })
    }

    fn attempt(&self, prompt: &str) -> Result<String, (bool, String)> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        });
        let mut req = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| (true, e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            let retryable = status.as_u16() == 429 || status.is_server_error();
            return Err((retryable, format!("HTTP {status}")));
        }
        let value: Value = resp.json().map_err(|e| (true, e.to_string()))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| (false, "response has no choices[0].message.content".into()))
    }
}

impl Backend for HttpBackend {
    fn name(&self) -> String {
        format!("http:{}", self.model)
    }

    fn complete(&self, _instance: &TaskInstance, prompt: &str) -> Result<String, BackendError> {
        let mut delay = self.backoff_base;
        let mut attempt = 0;
        loop {
            match self.attempt(prompt) {
                Ok(text) => return Ok(text),
                Err((retryable, msg)) => {
                    if !retryable || attempt >= self.max_retries {
                        return Err(BackendError(format!(
                            "{msg} (after {} attempt(s))",
                            attempt + 1
                        )));
                    }
                    log::debug!("retrying in {delay:?}: {msg}");
                    thread::sleep(delay);
                    delay *= self.backoff_factor;
                    attempt += 1;
                }
            }
        }
    }
}
