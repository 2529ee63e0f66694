//! Run configuration. Deserializable from a TOML/JSON document; every
//! field has a default so an empty file is a valid offline configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::annotate::{AnnotationPolicy, DEFAULT_EXCLUDED_ANCESTORS};
use crate::classify::{CategoryLabel, DEFAULT_MAX_CHARS, DEFAULT_TECH_PREFIXES, DEFAULT_TECH_SEEDS};
use crate::content::NoiseSelectorList;
use crate::error::ConfigError;
use crate::matcher::{KeySet, MatchOptions};
use crate::pipeline::AnnotateTarget;
use crate::prompt::LlmDefinition;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderMode {
    #[default]
    Offline,
    Live,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub mode: ProviderMode,
    pub cache: bool,
    pub discover: bool,
    pub max_chars: usize,
    pub annotate_target: AnnotateTarget,
    pub glossary: GlossaryConfig,
    pub content: ContentConfig,
    pub annotation: AnnotationConfig,
    pub classifier: ClassifierConfig,
    pub llm_stub: LlmStubConfig,
    pub live: LiveConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: ProviderMode::Offline,
            cache: true,
            discover: true,
            max_chars: DEFAULT_MAX_CHARS,
            annotate_target: AnnotateTarget::Sanitized,
            glossary: GlossaryConfig::default(),
            content: ContentConfig::default(),
            annotation: AnnotationConfig::default(),
            classifier: ClassifierConfig::default(),
            llm_stub: LlmStubConfig::default(),
            live: LiveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlossaryConfig {
    /// Local JSON-lines store; created from the seed dictionary if missing.
    pub store: Option<PathBuf>,
    /// Base URL of a running glossary service.
    pub url: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContentConfig {
    /// Replaces the default noise selectors when set.
    pub noise_selectors: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotationConfig {
    pub excluded_ancestors: Vec<String>,
    pub annotate_every_occurrence: bool,
    pub match_plural: bool,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        AnnotationConfig {
            excluded_ancestors: DEFAULT_EXCLUDED_ANCESTORS.iter().map(|s| s.to_string()).collect(),
            annotate_every_occurrence: true,
            match_plural: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OfflineStrategy {
    /// Keyword heuristic only.
    #[default]
    Keywords,
    /// Full taxonomy-then-LLM chain over stub providers.
    Chain,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StubAnswer {
    Yes,
    No,
    #[default]
    Keywords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub strategy: OfflineStrategy,
    pub seed_keywords: Vec<String>,
    pub tech_prefixes: Vec<String>,
    pub min_confidence: f64,
    /// Labels returned by the stub taxonomy provider.
    pub stub_labels: Vec<CategoryLabel>,
    pub stub_taxonomy_available: bool,
    /// How the stub LLM answers the classification question.
    pub stub_llm_answer: StubAnswer,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            strategy: OfflineStrategy::Keywords,
            seed_keywords: DEFAULT_TECH_SEEDS.iter().map(|s| s.to_string()).collect(),
            tech_prefixes: DEFAULT_TECH_PREFIXES.iter().map(|s| s.to_string()).collect(),
            min_confidence: 0.0,
            stub_labels: Vec::new(),
            stub_taxonomy_available: true,
            stub_llm_answer: StubAnswer::Keywords,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmStubConfig {
    pub available: bool,
    /// Extra definitions the stub LLM knows.
    pub definitions: Vec<LlmDefinition>,
}

impl Default for LlmStubConfig {
    fn default() -> Self {
        LlmStubConfig {
            available: true,
            definitions: Vec::new(),
        }
    }
}

pub const TAXONOMY_KEY_ENV: &str = "TAXONOMY_API_KEY";
pub const LLM_KEY_ENV: &str = "LLM_API_KEY";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiveConfig {
    pub taxonomy_url: String,
    pub llm_url: String,
    pub llm_model: String,
    pub timeout_secs: u64,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            taxonomy_url: "https://language.googleapis.com/v2/documents:classifyText".into(),
            llm_url: "https://api.openai.com/v1/chat/completions".into(),
            llm_model: "gpt-4o-mini".into(),
            timeout_secs: 10,
        }
    }
}

impl PipelineConfig {
    pub fn selectors(&self) -> Result<NoiseSelectorList, ConfigError> {
        match &self.content.noise_selectors {
            Some(list) => NoiseSelectorList::parse_all(list),
            None => Ok(NoiseSelectorList::default()),
        }
    }

    pub fn policy(&self) -> AnnotationPolicy {
        let mut p = AnnotationPolicy::with_excluded(&self.annotation.excluded_ancestors);
        p.annotate_every_occurrence = self.annotation.annotate_every_occurrence;
        p.match_options = MatchOptions {
            match_plural: self.annotation.match_plural,
        };
        p
    }

    pub fn seed_keywords(&self) -> KeySet {
        KeySet::new(self.classifier.seed_keywords.iter().cloned())
    }

    /// Checks that do not depend on the environment.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.selectors()?;
        if self.max_chars == 0 {
            return Err(ConfigError("max_chars must be at least 1".into()));
        }
        if self.glossary.store.is_some() && self.glossary.url.is_some() {
            return Err(ConfigError(
                "glossary.store and glossary.url are mutually exclusive".into(),
            ));
        }
        if self.classifier.tech_prefixes.is_empty() {
            return Err(ConfigError("classifier.tech_prefixes must not be empty".into()));
        }
        if !(0.0..=1.0).contains(&self.classifier.min_confidence) {
            return Err(ConfigError("classifier.min_confidence must be in [0, 1]".into()));
        }
        for l in &self.classifier.stub_labels {
            if l.path.trim().is_empty() || !(0.0..=1.0).contains(&l.confidence) {
                return Err(ConfigError(format!("invalid stub label {l:?}")));
            }
        }
        if self.mode == ProviderMode::Live && self.live.timeout_secs == 0 {
            return Err(ConfigError("live.timeout_secs must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        let c: PipelineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, PipelineConfig::default());
        c.validate().unwrap();
        assert_eq!(c.selectors().unwrap(), NoiseSelectorList::default());
        assert_eq!(c.policy(), AnnotationPolicy::default());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<PipelineConfig>("{\"cahce\": false}").is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = PipelineConfig::default();
        c.content.noise_selectors = Some(vec!["div > p".into()]);
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.glossary.store = Some("a".into());
        c.glossary.url = Some("http://x".into());
        assert!(c.validate().is_err());

        let mut c = PipelineConfig::default();
        c.classifier.min_confidence = 2.0;
        assert!(c.validate().is_err());
    }
}
