//! Turns a config file plus flags into a glossary handle, providers and a
//! ready pipeline.

use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use acro_core::classify::ClassifierChain;
use acro_core::config::{OfflineStrategy, PipelineConfig, ProviderMode, StubAnswer};
use acro_core::error::{ConfigError, GlossaryError};
use acro_core::glossary::{Contribution, GlossaryClient, GlossaryEntry, GlossaryStore};
use acro_core::pipeline::{Classifier, Pipeline};
use acro_core::provider::{LlmProvider, StubLlm, StubTaxonomy, StubVerdict, TaxonomyProvider};
use acro_core::prompt::LlmDefinition;

use crate::args::GlobalArgs;
use crate::error::{CliError, CliResult};
use crate::live::{LiveLlm, LiveTaxonomy};
use crate::remote::HttpGlossary;

/// Timeout for glossary service requests.
pub const GLOSSARY_TIMEOUT: Duration = Duration::from_secs(10);

pub fn read_config(path: &Path) -> Result<PipelineConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

/// Config file (if any) with command-line overrides applied, validated.
pub fn load_config(args: &GlobalArgs) -> Result<PipelineConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(p) => read_config(p)?,
        None => PipelineConfig::default(),
    };
    if args.offline {
        cfg.mode = ProviderMode::Offline;
    }
    if args.live {
        cfg.mode = ProviderMode::Live;
    }
    if let Some(url) = &args.glossary_url {
        cfg.glossary.url = Some(url.clone());
        cfg.glossary.store = None;
    }
    if let Some(store) = &args.store {
        cfg.glossary.store = Some(store.clone());
        cfg.glossary.url = None;
    }
    if args.no_cache {
        cfg.cache = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The configured glossary: a local store or a remote service.
#[derive(Clone)]
pub enum Glossary {
    Local(Arc<GlossaryStore>),
    Remote(Arc<HttpGlossary>),
}

impl Glossary {
    pub fn open(cfg: &PipelineConfig) -> Result<Self, GlossaryError> {
        if let Some(url) = &cfg.glossary.url {
            return Ok(Glossary::Remote(Arc::new(HttpGlossary::new(url, GLOSSARY_TIMEOUT)?)));
        }
        let store = match &cfg.glossary.store {
            Some(path) => GlossaryStore::open_or_seed(path)?,
            None => GlossaryStore::seeded(),
        };
        Ok(Glossary::Local(Arc::new(store)))
    }

    pub fn client(&self) -> Arc<dyn GlossaryClient> {
        match self {
            Glossary::Local(s) => s.clone(),
            Glossary::Remote(r) => r.clone(),
        }
    }

    pub fn is_persistent(&self) -> bool {
        match self {
            Glossary::Local(s) => s.path().is_some(),
            Glossary::Remote(_) => true,
        }
    }

    pub fn search(&self, query: &str, limit: u64) -> Result<Vec<GlossaryEntry>, GlossaryError> {
        match self {
            Glossary::Local(s) => {
                let limit = usize::try_from(limit)
                    .ok()
                    .and_then(std::num::NonZeroUsize::new)
                    .ok_or_else(|| GlossaryError::ValidationFailed("limit must be at least 1".into()))?;
                Ok(s.search(query, limit))
            }
            Glossary::Remote(r) => r.search(query, limit),
        }
    }

    pub fn submit_contribution(&self, entry: GlossaryEntry) -> Result<u64, GlossaryError> {
        match self {
            Glossary::Local(s) => s.submit_contribution(entry),
            Glossary::Remote(r) => r.submit_contribution(&entry),
        }
    }

    pub fn approve_contribution(&self, id: u64) -> Result<GlossaryEntry, GlossaryError> {
        match self {
            Glossary::Local(s) => s.approve_contribution(id),
            Glossary::Remote(r) => r.approve_contribution(id),
        }
    }

    pub fn pending(&self) -> Result<Vec<Contribution>, GlossaryError> {
        match self {
            Glossary::Local(s) => Ok(s.pending()),
            Glossary::Remote(r) => r.pending(),
        }
    }
}

#[derive(Clone)]
pub struct Providers {
    pub taxonomy: Arc<dyn TaxonomyProvider>,
    pub llm: Arc<dyn LlmProvider>,
}

impl Providers {
    pub fn build(cfg: &PipelineConfig) -> Result<Self, ConfigError> {
        match cfg.mode {
            ProviderMode::Offline => Ok(Self::offline(cfg, std::iter::empty())),
            ProviderMode::Live => Ok(Providers {
                taxonomy: Arc::new(LiveTaxonomy::from_env(&cfg.live)?),
                llm: Arc::new(LiveLlm::from_env(&cfg.live)?),
            }),
        }
    }

    /// Stub providers per the config; `extra` definitions are added to the
    /// stub LLM's table ahead of the configured ones.
    pub fn offline(cfg: &PipelineConfig, extra: impl IntoIterator<Item = LlmDefinition>) -> Self {
        let c = &cfg.classifier;
        let taxonomy = if c.stub_taxonomy_available {
            StubTaxonomy::fixed(c.stub_labels.clone())
        } else {
            StubTaxonomy::unavailable()
        };
        let llm = if cfg.llm_stub.available {
            let verdict = match c.stub_llm_answer {
                StubAnswer::Yes => StubVerdict::Always(true),
                StubAnswer::No => StubVerdict::Always(false),
                StubAnswer::Keywords => StubVerdict::Keywords(cfg.seed_keywords()),
            };
            StubLlm::new(verdict)
                .with_definitions(extra)
                .with_definitions(cfg.llm_stub.definitions.iter().cloned())
        } else {
            StubLlm::unavailable()
        };
        Providers {
            taxonomy: Arc::new(taxonomy),
            llm: Arc::new(llm),
        }
    }
}

pub fn classifier(cfg: &PipelineConfig, providers: &Providers) -> Classifier {
    if cfg.mode == ProviderMode::Offline && cfg.classifier.strategy == OfflineStrategy::Keywords {
        return Classifier::Keywords(cfg.seed_keywords());
    }
    let mut chain = ClassifierChain::new(providers.taxonomy.clone(), providers.llm.clone());
    chain.tech_prefixes = cfg.classifier.tech_prefixes.clone();
    chain.min_confidence = cfg.classifier.min_confidence;
    chain.max_chars = cfg.max_chars;
    Classifier::Chain(chain)
}

pub fn pipeline(cfg: &PipelineConfig, glossary: Arc<dyn GlossaryClient>, providers: &Providers) -> CliResult<Pipeline> {
    let mut p = Pipeline::new(glossary);
    p.selectors = cfg.selectors().map_err(CliError::from)?;
    p.classifier = classifier(cfg, providers);
    p.llm = Some(providers.llm.clone());
    p.policy = cfg.policy();
    p.cache_enabled = cfg.cache;
    p.discover = cfg.discover;
    p.target = cfg.annotate_target;
    p.max_chars = cfg.max_chars;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use acro_core::classify::CategoryLabel;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "cache = true\n[glossary]\nurl = \"http://localhost:1\"\n").unwrap();
        let args = GlobalArgs {
            config: Some(path),
            store: Some(dir.path().join("g.jsonl")),
            no_cache: true,
            ..GlobalArgs::default()
        };
        let cfg = load_config(&args).unwrap();
        assert!(!cfg.cache);
        assert_eq!(cfg.glossary.url, None);
        assert!(cfg.glossary.store.is_some());
    }

    #[test]
    fn bad_config_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "max_chars = \"many\"").unwrap();
        let args = GlobalArgs {
            config: Some(path.clone()),
            ..GlobalArgs::default()
        };
        assert!(load_config(&args).is_err());
        let missing = GlobalArgs {
            config: Some(dir.path().join("nope.toml")),
            ..GlobalArgs::default()
        };
        assert!(load_config(&missing).is_err());
    }

    #[test]
    fn chain_strategy_uses_stub_labels() {
        let mut cfg = PipelineConfig::default();
        cfg.classifier.strategy = OfflineStrategy::Chain;
        cfg.classifier.stub_labels = vec![CategoryLabel::new("/Politics", 0.9).unwrap()];
        cfg.classifier.stub_llm_answer = StubAnswer::Yes;
        let providers = Providers::build(&cfg).unwrap();
        let c = classifier(&cfg, &providers).classify("Parliament and blockchain").unwrap();
        assert!(c.is_tech);
        assert_eq!(c.decided_by.to_string(), "llm_fallback");
    }
}
