//! Phase B: is the page technology-related?
//!
//! The taxonomy provider is asked first. Only when none of its labels falls
//! under a technology category is the LLM asked the boolean question.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::matcher::{find_matches, KeySet};
use crate::prompt::{parse_boolean, tech_prompt};
use crate::provider::{LlmProvider, TaxonomyProvider};
use crate::text::truncate_chars;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryLabel {
    /// Slash-separated taxonomy path, e.g. `/Computers & Electronics/Software`.
    pub path: String,
    /// In `[0, 1]`.
    pub confidence: f64,
}

impl CategoryLabel {
    /// Clamps `confidence` into `[0, 1]`; `None` for an empty path.
    pub fn new(path: impl Into<String>, confidence: f64) -> Option<Self> {
        let path = path.into();
        if path.trim().is_empty() || confidence.is_nan() {
            return None;
        }
        Some(CategoryLabel {
            path,
            confidence: confidence.clamp(0.0, 1.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecidedBy {
    Taxonomy,
    LlmFallback,
    OfflineStub,
}

impl fmt::Display for DecidedBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecidedBy::Taxonomy => "taxonomy",
            DecidedBy::LlmFallback => "llm_fallback",
            DecidedBy::OfflineStub => "offline_stub",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageClassification {
    pub labels: Vec<CategoryLabel>,
    pub is_tech: bool,
    pub decided_by: DecidedBy,
    /// Provider failures that were absorbed on the way to the verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degraded: Vec<String>,
}

pub const DEFAULT_TECH_PREFIXES: &[&str] = &[
    "/Computers & Electronics",
    "/Internet & Telecom",
    "/Science/Engineering & Technology",
    "/Science/Computer Science",
];

/// Characters of page text sent to any provider.
pub const DEFAULT_MAX_CHARS: usize = 5_000;

pub struct ClassifierChain {
    pub taxonomy: Arc<dyn TaxonomyProvider>,
    pub llm: Arc<dyn LlmProvider>,
    pub tech_prefixes: Vec<String>,
    /// Labels below this confidence are ignored.
    pub min_confidence: f64,
    pub max_chars: usize,
}

impl ClassifierChain {
    pub fn new(taxonomy: Arc<dyn TaxonomyProvider>, llm: Arc<dyn LlmProvider>) -> Self {
        ClassifierChain {
            taxonomy,
            llm,
            tech_prefixes: DEFAULT_TECH_PREFIXES.iter().map(|s| s.to_string()).collect(),
            min_confidence: 0.0,
            max_chars: DEFAULT_MAX_CHARS,
        }
    }

    pub fn classify(&self, text: &str) -> Result<PageClassification, PipelineError> {
        classify(text, self)
    }
}

/// True iff some label path starts with some prefix, ignoring case.
pub fn taxonomy_is_tech<S: AsRef<str>>(labels: &[CategoryLabel], prefixes: &[S]) -> bool {
    labels.iter().any(|l| {
        let path = l.path.to_lowercase();
        prefixes
            .iter()
            .any(|p| path.starts_with(&p.as_ref().to_lowercase()))
    })
}

pub fn classify(text: &str, chain: &ClassifierChain) -> Result<PageClassification, PipelineError> {
    if text.trim().is_empty() {
        return Err(PipelineError::EmptyText);
    }
    let text = truncate_chars(text, chain.max_chars);
    let mut degraded = Vec::new();

    let labels = match chain.taxonomy.categorize(text) {
        Ok(labels) => {
            let accepted: Vec<CategoryLabel> = labels
                .into_iter()
                .filter(|l| l.confidence >= chain.min_confidence)
                .collect();
            if taxonomy_is_tech(&accepted, &chain.tech_prefixes) {
                return Ok(PageClassification {
                    labels: accepted,
                    is_tech: true,
                    decided_by: DecidedBy::Taxonomy,
                    degraded,
                });
            }
            Some(accepted)
        }
        Err(e) => {
            tracing::warn!(error = %e, "taxonomy provider failed; asking the LLM only");
            degraded.push(format!("taxonomy: {e}"));
            None
        }
    };

    let answer = chain
        .llm
        .complete(&tech_prompt(text))
        .and_then(|reply| parse_boolean(&reply));
    match (answer, labels) {
        (Ok(is_tech), labels) => Ok(PageClassification {
            labels: labels.unwrap_or_default(),
            is_tech,
            decided_by: DecidedBy::LlmFallback,
            degraded,
        }),
        // The taxonomy did answer (negatively); keep its verdict.
        (Err(e), Some(labels)) if !labels.is_empty() => {
            tracing::warn!(error = %e, "LLM fallback failed; keeping the taxonomy verdict");
            degraded.push(format!("llm: {e}"));
            Ok(PageClassification {
                labels,
                is_tech: false,
                decided_by: DecidedBy::Taxonomy,
                degraded,
            })
        }
        (Err(e), _) => {
            degraded.push(format!("llm: {e}"));
            Err(PipelineError::AllProvidersFailed(degraded.join("; ")))
        }
    }
}

/// Seed keywords of the offline keyword classifier.
pub const DEFAULT_TECH_SEEDS: &[&str] = &[
    "CPU", "GPU", "SSD", "HDD", "RAM", "API", "HTTP", "HTTPS", "HTML", "CSS", "URL", "USB",
    "SQL", "DNS", "TCP", "IP", "LAN", "VPN", "BIOS", "OS", "AI", "ML", "IoT", "SaaS", "JSON",
    "XML", "Wi-Fi", "Bluetooth", "software", "hardware", "computer", "computers", "algorithm",
    "database", "server", "servers", "network", "internet", "programming", "processor",
    "browser", "firmware", "compiler", "encryption", "protocol", "bandwidth", "cloud",
    "smartphone", "laptop", "Linux", "Windows", "JavaScript", "Python", "developer",
    "developers", "code", "app", "apps", "chip", "chips", "data", "cybersecurity",
    "blockchain", "technology",
];

pub fn default_tech_seeds() -> KeySet {
    KeySet::new(DEFAULT_TECH_SEEDS.iter().copied())
}

/// Distinct seed hits needed for a positive offline verdict.
pub const STUB_MIN_HITS: usize = 3;

/// Offline classifier: tech iff at least three distinct seed keywords
/// occur as whole words.
pub fn stub_classify(text: &str, seeds: &KeySet) -> PageClassification {
    let hits: BTreeSet<String> = find_matches(text, seeds)
        .into_iter()
        .map(|m| m.key)
        .collect();
    PageClassification {
        labels: Vec::new(),
        is_tech: hits.len() >= STUB_MIN_HITS,
        decided_by: DecidedBy::OfflineStub,
        degraded: Vec::new(),
    }
}
