//! Blocking client for the glossary HTTP API.

use std::time::Duration;

use acro_core::error::GlossaryError;
use acro_core::glossary::{Contribution, GlossaryClient, GlossaryEntry};
use acro_core::matcher::KeySet;
use reqwest::blocking::{Client, RequestBuilder, Response};
use reqwest::{StatusCode, Url};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::server::{ContributionAck, ErrorBody, KeysBody, SearchBody};

#[derive(Debug, Clone)]
pub struct HttpGlossary {
    base: Url,
    client: Client,
}

impl HttpGlossary {
    pub fn new(base: &str, timeout: Duration) -> Result<Self, GlossaryError> {
        let mut base = Url::parse(base)
            .map_err(|e| GlossaryError::Unreachable(format!("invalid glossary URL {base:?}: {e}")))?;
        if base.cannot_be_a_base() {
            return Err(GlossaryError::Unreachable(format!("{base} cannot be a base URL")));
        }
        // Trailing slash so relative joins keep any path prefix.
        if !base.path().ends_with('/') {
            let p = format!("{}/", base.path());
            base.set_path(&p);
        }
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GlossaryError::Unreachable(e.to_string()))?;
        Ok(HttpGlossary { base, client })
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut()
            .expect("checked in new")
            .pop_if_empty()
            .extend(segments);
        url
    }

    fn send(&self, req: RequestBuilder) -> Result<Response, GlossaryError> {
        let resp = req
            .send()
            .map_err(|e| GlossaryError::Unreachable(e.to_string()))?;
        if resp.status().is_success() {
            Ok(resp)
        } else {
            Err(error_from(resp))
        }
    }

    fn json<T: DeserializeOwned>(resp: Response) -> Result<T, GlossaryError> {
        resp.json()
            .map_err(|e| GlossaryError::Unreachable(format!("malformed response: {e}")))
    }

    pub fn search(&self, query: &str, limit: u64) -> Result<Vec<GlossaryEntry>, GlossaryError> {
        let mut url = self.url(&["search"]);
        url.query_pairs_mut()
            .append_pair("q", query)
            .append_pair("limit", &limit.to_string());
        let body: SearchBody = Self::json(self.send(self.client.get(url))?)?;
        Ok(body.results)
    }

    pub fn submit_contribution(&self, entry: &GlossaryEntry) -> Result<u64, GlossaryError> {
        let req = self.client.post(self.url(&["contributions"])).json(entry);
        let ack: ContributionAck = Self::json(self.send(req)?)?;
        Ok(ack.id)
    }

    pub fn approve_contribution(&self, id: u64) -> Result<GlossaryEntry, GlossaryError> {
        let url = self.url(&["contributions", &id.to_string(), "approve"]);
        Self::json(self.send(self.client.post(url))?)
    }

    pub fn pending(&self) -> Result<Vec<Contribution>, GlossaryError> {
        #[derive(Deserialize)]
        struct Body {
            pending: Vec<Contribution>,
        }
        let body: Body = Self::json(self.send(self.client.get(self.url(&["contributions"])))?)?;
        Ok(body.pending)
    }
}

fn error_from(resp: Response) -> GlossaryError {
    let status = resp.status();
    let body: Option<ErrorBody> = resp.json().ok();
    let (code, message) = body
        .map(|b| (b.error, b.message))
        .unwrap_or_else(|| (String::new(), format!("HTTP {status}")));
    match (status, code.as_str()) {
        (StatusCode::NOT_FOUND, "unknown_contribution") => {
            let id = message
                .split_whitespace()
                .rev()
                .find_map(|w| w.parse().ok())
                .unwrap_or(0);
            GlossaryError::UnknownContribution(id)
        }
        (StatusCode::NOT_FOUND, _) => GlossaryError::NotFound(message),
        (StatusCode::CONFLICT, _) => GlossaryError::ConflictCurated(message),
        (StatusCode::BAD_REQUEST, _) | (StatusCode::UNPROCESSABLE_ENTITY, _) => {
            GlossaryError::ValidationFailed(message)
        }
        (StatusCode::SERVICE_UNAVAILABLE, _) => GlossaryError::StoreUnavailable(message),
        _ => GlossaryError::Unreachable(format!("HTTP {status}: {message}")),
    }
}

impl GlossaryClient for HttpGlossary {
    fn list_keys(&self) -> Result<KeySet, GlossaryError> {
        let body: KeysBody = Self::json(self.send(self.client.get(self.url(&["terms"])))?)?;
        Ok(KeySet::new(body.keys))
    }

    fn get_entry(&self, key: &str) -> Result<Option<GlossaryEntry>, GlossaryError> {
        match self.send(self.client.get(self.url(&["terms", key]))) {
            Ok(resp) => Self::json(resp).map(Some),
            Err(GlossaryError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
        let req = self.client.post(self.url(&["cache"])).json(&entry);
        Self::json(self.send(req)?)
    }
}
