//! Backend contracts for taxonomy classification and LLM completion, plus
//! the deterministic offline stubs and generic wrappers (call counting,
//! injected latency).

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use crate::classify::{stub_classify, CategoryLabel};
use crate::clock::Clock;
use crate::error::{GlossaryError, ProviderError};
use crate::glossary::{GlossaryClient, GlossaryEntry};
use crate::matcher::KeySet;
use crate::prompt::{define_prompt_candidates, tech_prompt_text, LlmDefinition};
use crate::text::fold_str;

/// Maps page text to taxonomy category labels.
pub trait TaxonomyProvider: Send + Sync {
    fn categorize(&self, text: &str) -> Result<Vec<CategoryLabel>, ProviderError>;
}

/// Single-turn text completion.
pub trait LlmProvider: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError>;
}

impl<T: TaxonomyProvider + ?Sized> TaxonomyProvider for Arc<T> {
    fn categorize(&self, text: &str) -> Result<Vec<CategoryLabel>, ProviderError> {
        (**self).categorize(text)
    }
}

impl<T: LlmProvider + ?Sized> LlmProvider for Arc<T> {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        (**self).complete(prompt)
    }
}

/// Counts invocations of the wrapped provider.
#[derive(Debug, Default)]
pub struct Counted<P> {
    inner: P,
    calls: AtomicUsize,
}

impl<P> Counted<P> {
    pub fn new(inner: P) -> Self {
        Counted {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: TaxonomyProvider> TaxonomyProvider for Counted<P> {
    fn categorize(&self, text: &str) -> Result<Vec<CategoryLabel>, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.categorize(text)
    }
}

impl<P: LlmProvider> LlmProvider for Counted<P> {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(prompt)
    }
}

/// Waits a fixed (usually simulated) latency on `clock` before each call.
pub struct Delayed<P> {
    inner: P,
    delay: Duration,
    clock: Arc<dyn Clock>,
}

impl<P> Delayed<P> {
    pub fn new(inner: P, delay: Duration, clock: Arc<dyn Clock>) -> Self {
        Delayed {
            inner,
            delay,
            clock,
        }
    }
}

impl<P: TaxonomyProvider> TaxonomyProvider for Delayed<P> {
    fn categorize(&self, text: &str) -> Result<Vec<CategoryLabel>, ProviderError> {
        self.clock.sleep(self.delay);
        self.inner.categorize(text)
    }
}

impl<P: LlmProvider> LlmProvider for Delayed<P> {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        self.clock.sleep(self.delay);
        self.inner.complete(prompt)
    }
}

/// The dictionary round trip is charged once per page, on the key listing;
/// entry lookups and write-backs are free.
impl<G: GlossaryClient> GlossaryClient for Delayed<G> {
    fn list_keys(&self) -> Result<KeySet, GlossaryError> {
        self.clock.sleep(self.delay);
        self.inner.list_keys()
    }

    fn get_entry(&self, key: &str) -> Result<Option<GlossaryEntry>, GlossaryError> {
        self.inner.get_entry(key)
    }

    fn upsert_cached(&self, entry: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
        self.inner.upsert_cached(entry)
    }
}

/// Taxonomy stub returning fixed labels, or failing when built with
/// [`StubTaxonomy::unavailable`].
#[derive(Debug, Clone, Default)]
pub struct StubTaxonomy {
    labels: Option<Vec<CategoryLabel>>,
}

impl StubTaxonomy {
    pub fn fixed(labels: Vec<CategoryLabel>) -> Self {
        StubTaxonomy {
            labels: Some(labels),
        }
    }

    pub fn unavailable() -> Self {
        StubTaxonomy { labels: None }
    }
}

impl TaxonomyProvider for StubTaxonomy {
    fn categorize(&self, _text: &str) -> Result<Vec<CategoryLabel>, ProviderError> {
        self.labels
            .clone()
            .ok_or_else(|| ProviderError::Unavailable("stub taxonomy configured as down".into()))
    }
}

/// How the stub LLM answers the classification question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubVerdict {
    Always(bool),
    /// Keyword heuristic of [`stub_classify`].
    Keywords(KeySet),
}

/// Offline LLM stand-in. Answers the classification question per its
/// [`StubVerdict`] and definition requests from a fixed table; candidates
/// missing from the table are declined. Any other prompt gets an
/// unparseable reply.
#[derive(Debug, Clone)]
pub struct StubLlm {
    verdict: StubVerdict,
    definitions: BTreeMap<String, LlmDefinition>,
    available: bool,
}

impl StubLlm {
    pub fn new(verdict: StubVerdict) -> Self {
        StubLlm {
            verdict,
            definitions: BTreeMap::new(),
            available: true,
        }
    }

    pub fn unavailable() -> Self {
        StubLlm {
            available: false,
            ..Self::new(StubVerdict::Always(false))
        }
    }

    pub fn with_definition(
        mut self,
        key: impl Into<String>,
        expansion: impl Into<String>,
        definition: impl Into<String>,
    ) -> Self {
        let key = key.into();
        self.definitions.insert(
            fold_str(&key),
            LlmDefinition {
                key,
                expansion: expansion.into(),
                definition: definition.into(),
            },
        );
        self
    }

    pub fn with_definitions(mut self, defs: impl IntoIterator<Item = LlmDefinition>) -> Self {
        for d in defs {
            self.definitions.insert(fold_str(&d.key), d);
        }
        self
    }
}

impl LlmProvider for StubLlm {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        if !self.available {
            return Err(ProviderError::Unavailable("stub LLM configured as down".into()));
        }
        if let Some(text) = tech_prompt_text(prompt) {
            let yes = match &self.verdict {
                StubVerdict::Always(b) => *b,
                StubVerdict::Keywords(seeds) => stub_classify(text, seeds).is_tech,
            };
            return Ok(if yes { "Yes" } else { "No" }.to_string());
        }
        if let Some(cands) = define_prompt_candidates(prompt) {
            let defs: Vec<&LlmDefinition> = cands
                .iter()
                .filter_map(|c| self.definitions.get(&fold_str(c)))
                .collect();
            return Ok(serde_json::to_string(&defs).expect("definitions serialize"));
        }
        Ok("I am not sure what you are asking.".to_string())
    }
}
