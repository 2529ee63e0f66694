//! Adapters for hosted providers: a content-categorization endpoint in the
//! style of a natural-language API, and an OpenAI-compatible chat endpoint.

use std::time::Duration;

use acro_core::classify::CategoryLabel;
use acro_core::config::{LiveConfig, LLM_KEY_ENV, TAXONOMY_KEY_ENV};
use acro_core::error::{ConfigError, ProviderError};
use acro_core::provider::{LlmProvider, TaxonomyProvider};
use reqwest::blocking::{Client, RequestBuilder};
use serde::Deserialize;
use serde_json::json;

fn client(timeout: Duration) -> Result<Client, ConfigError> {
    Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| ConfigError(format!("cannot build HTTP client: {e}")))
}

fn key_from_env(var: &str) -> Result<String, ConfigError> {
    match std::env::var(var) {
        Ok(k) if !k.trim().is_empty() => Ok(k),
        _ => Err(ConfigError(format!("live mode needs the {var} environment variable"))),
    }
}

fn send<T: for<'de> Deserialize<'de>>(req: RequestBuilder, timeout: Duration) -> Result<T, ProviderError> {
    let resp = req.send().map_err(|e| {
        if e.is_timeout() {
            ProviderError::Timeout(timeout.as_millis() as u64)
        } else {
            ProviderError::Unavailable(e.to_string())
        }
    })?;
    let status = resp.status();
    if status.is_server_error() || status.as_u16() == 429 {
        return Err(ProviderError::Unavailable(format!("HTTP {status}")));
    }
    if !status.is_success() {
        return Err(ProviderError::BadResponse(format!("HTTP {status}")));
    }
    resp.json()
        .map_err(|e| ProviderError::BadResponse(format!("malformed body: {e}")))
}

pub struct LiveTaxonomy {
    client: Client,
    url: String,
    key: String,
    timeout: Duration,
}

impl LiveTaxonomy {
    pub fn from_env(cfg: &LiveConfig) -> Result<Self, ConfigError> {
        Self::new(cfg, key_from_env(TAXONOMY_KEY_ENV)?)
    }

    pub fn new(cfg: &LiveConfig, key: String) -> Result<Self, ConfigError> {
        let timeout = Duration::from_secs(cfg.timeout_secs);
        Ok(LiveTaxonomy {
            client: client(timeout)?,
            url: cfg.taxonomy_url.clone(),
            key,
            timeout,
        })
    }
}

#[derive(Deserialize)]
struct ClassifyResponse {
    #[serde(default)]
    categories: Vec<Category>,
}

#[derive(Deserialize)]
struct Category {
    name: String,
    #[serde(default)]
    confidence: f64,
}

impl TaxonomyProvider for LiveTaxonomy {
    fn categorize(&self, text: &str) -> Result<Vec<CategoryLabel>, ProviderError> {
        let mut url = reqwest::Url::parse(&self.url)
            .map_err(|e| ProviderError::Unavailable(format!("invalid taxonomy URL: {e}")))?;
        url.query_pairs_mut().append_pair("key", &self.key);
        let req = self
            .client
            .post(url)
            .json(&json!({"document": {"type": "PLAIN_TEXT", "content": text}}));
        let body: ClassifyResponse = send(req, self.timeout)?;
        Ok(body
            .categories
            .into_iter()
            .filter_map(|c| CategoryLabel::new(c.name, c.confidence))
            .collect())
    }
}

pub struct LiveLlm {
    client: Client,
    url: String,
    key: String,
    model: String,
    timeout: Duration,
}

impl LiveLlm {
    pub fn from_env(cfg: &LiveConfig) -> Result<Self, ConfigError> {
        Self::new(cfg, key_from_env(LLM_KEY_ENV)?)
    }

    pub fn new(cfg: &LiveConfig, key: String) -> Result<Self, ConfigError> {
        let timeout = Duration::from_secs(cfg.timeout_secs);
        Ok(LiveLlm {
            client: client(timeout)?,
            url: cfg.llm_url.clone(),
            key,
            model: cfg.llm_model.clone(),
            timeout,
        })
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

impl LlmProvider for LiveLlm {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        let req = self.client.post(&self.url).bearer_auth(&self.key).json(&json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": prompt}],
        }));
        let body: ChatResponse = send(req, self.timeout)?;
        body.choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ProviderError::BadResponse("no completion in response".into()))
    }
}
