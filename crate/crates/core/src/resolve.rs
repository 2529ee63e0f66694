//! Definition lookup for matched and discovered acronyms: dictionary first,
//! one batched LLM request for the rest, and optional write-back of the
//! LLM's answers into the dictionary.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::GlossaryError;
use crate::glossary::{GlossaryClient, GlossaryEntry, Origin};
use crate::matcher::MatchSpan;
use crate::prompt::{define_prompt, parse_definitions};
use crate::provider::LlmProvider;
use crate::text::{fold_str, truncate_chars};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSource {
    Dictionary,
    Llm,
    /// Served from the resolver's in-process memo (warm runs).
    Cache,
}

impl fmt::Display for TermSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermSource::Dictionary => "dictionary",
            TermSource::Llm => "llm",
            TermSource::Cache => "cache",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedTerm {
    pub key: String,
    pub expansion: String,
    pub definition: String,
    pub source: TermSource,
}

impl ResolvedTerm {
    fn from_entry(e: GlossaryEntry, source: TermSource) -> Self {
        ResolvedTerm {
            key: e.key,
            expansion: e.expansion,
            definition: e.definition,
            source,
        }
    }

    /// Tooltip text: expansion and definition joined by U+2014 (em dash).
    pub fn tooltip(&self) -> String {
        if self.expansion.trim().is_empty() {
            self.definition.clone()
        } else {
            format!("{} \u{2014} {}", self.expansion, self.definition)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolveOutcome {
    pub terms: Vec<ResolvedTerm>,
    /// Keys that could not be resolved because the LLM was unavailable.
    pub unresolved: Vec<String>,
    /// Keys the LLM declined as not being technical acronyms.
    pub declined: Vec<String>,
    pub warnings: Vec<String>,
    pub llm_calls: usize,
}

/// In-process memo of resolved terms, keyed by folded key.
#[derive(Debug, Default)]
pub struct TermMemo(Mutex<HashMap<String, ResolvedTerm>>);

impl TermMemo {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, key: &str) -> Option<ResolvedTerm> {
        self.0.lock().expect("memo lock").get(&fold_str(key)).cloned()
    }

    fn put(&self, term: &ResolvedTerm) {
        self.0
            .lock()
            .expect("memo lock")
            .insert(fold_str(&term.key), term.clone());
    }
}

pub struct Resolver<'a> {
    pub glossary: &'a dyn GlossaryClient,
    pub llm: Option<&'a dyn LlmProvider>,
    pub cache_enabled: bool,
    /// Characters of context sent with an LLM request.
    pub max_chars: usize,
    pub memo: Option<&'a TermMemo>,
}

impl<'a> Resolver<'a> {
    pub fn new(glossary: &'a dyn GlossaryClient, llm: Option<&'a dyn LlmProvider>) -> Self {
        Resolver {
            glossary,
            llm,
            cache_enabled: true,
            max_chars: crate::classify::DEFAULT_MAX_CHARS,
            memo: None,
        }
    }

    /// Resolve the distinct keys of `matches`, plus discovered `candidates`
    /// the dictionary does not know. A glossary failure is fatal; an LLM
    /// failure leaves the affected keys unresolved.
    pub fn resolve(
        &self,
        matches: &[MatchSpan],
        candidates: &[String],
        context: &str,
    ) -> Result<ResolveOutcome, GlossaryError> {
        let mut out = ResolveOutcome::default();
        let mut seen: Vec<String> = Vec::new();
        let mut ask: Vec<String> = Vec::new();

        let keys = matches
            .iter()
            .map(|m| m.key.as_str())
            .chain(candidates.iter().map(String::as_str));
        for (i, key) in keys.enumerate() {
            let folded = fold_str(key);
            if seen.contains(&folded) {
                continue;
            }
            seen.push(folded);
            let is_match = i < matches.len();
            if let Some(t) = self.memo.and_then(|m| m.get(key)) {
                out.terms.push(ResolvedTerm {
                    source: TermSource::Cache,
                    ..t
                });
                continue;
            }
            if is_match {
                if let Some(entry) = self.glossary.get_entry(key)? {
                    let t = ResolvedTerm::from_entry(entry, TermSource::Dictionary);
                    self.remember(&t);
                    out.terms.push(t);
                    continue;
                }
            }
            ask.push(key.to_string());
        }

        if ask.is_empty() {
            return Ok(out);
        }
        let Some(llm) = self.llm else {
            out.warnings.push(format!(
                "no LLM configured; {} term(s) left unresolved",
                ask.len()
            ));
            out.unresolved = ask;
            return Ok(out);
        };
        out.llm_calls += 1;
        let prompt = define_prompt(&ask, truncate_chars(context, self.max_chars));
        let defs = match llm.complete(&prompt).and_then(|r| parse_definitions(&r)) {
            Ok(d) => d,
            Err(e) => {
                tracing::warn!(error = %e, "LLM definition request failed");
                out.warnings
                    .push(format!("LLM unavailable, {} term(s) unresolved: {e}", ask.len()));
                out.unresolved = ask;
                return Ok(out);
            }
        };
        for key in ask {
            let folded = fold_str(&key);
            let Some(def) = defs.iter().find(|d| fold_str(&d.key) == folded) else {
                out.declined.push(key);
                continue;
            };
            let term = ResolvedTerm {
                key: key.clone(),
                expansion: def.expansion.trim().to_string(),
                definition: def.definition.trim().to_string(),
                source: TermSource::Llm,
            };
            if self.cache_enabled {
                let entry = GlossaryEntry::new(
                    term.key.clone(),
                    term.expansion.clone(),
                    term.definition.clone(),
                    Origin::AiCached,
                );
                if let Err(e) = self.glossary.upsert_cached(entry) {
                    tracing::warn!(key = %term.key, error = %e, "definition cache write-back failed");
                    out.warnings.push(format!("cache write for {}: {e}", term.key));
                }
            }
            self.remember(&term);
            out.terms.push(term);
        }
        Ok(out)
    }

    fn remember(&self, t: &ResolvedTerm) {
        if let Some(m) = self.memo {
            m.put(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glossary::GlossaryStore;
    use crate::matcher::{find_matches, KeySet};
    use crate::provider::{Counted, StubLlm, StubVerdict};

    fn span(key: &str) -> MatchSpan {
        MatchSpan {
            key: key.into(),
            start: 0,
            end: key.len(),
            surface: key.into(),
        }
    }

    fn xqz_llm() -> Counted<StubLlm> {
        Counted::new(
            StubLlm::new(StubVerdict::Always(true)).with_definition(
                "XQZ",
                "Extended Query Zone",
                "A made-up acronym used in tests.",
            ),
        )
    }

    #[test]
    fn dictionary_hit() {
        let store = GlossaryStore::seeded();
        let llm = xqz_llm();
        let r = Resolver::new(&store, Some(&llm));
        let out = r.resolve(&[span("CPU")], &[], "").unwrap();
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms[0].source, TermSource::Dictionary);
        assert_eq!(llm.calls(), 0);
    }

    #[test]
    fn llm_then_cached_dictionary() {
        let store = GlossaryStore::seeded();
        let llm = xqz_llm();
        let r = Resolver::new(&store, Some(&llm));
        let text = "The XQZ module";
        let first = r
            .resolve(&[], &crate::matcher::discover_candidates(text, &store.list_keys()), text)
            .unwrap();
        assert_eq!(first.terms[0].source, TermSource::Llm);
        assert_eq!(store.get_entry("XQZ").unwrap().origin, Origin::AiCached);

        let matches = find_matches(text, &store.list_keys());
        let second = r
            .resolve(&matches, &crate::matcher::discover_candidates(text, &store.list_keys()), text)
            .unwrap();
        assert_eq!(second.terms[0].source, TermSource::Dictionary);
        assert_eq!(llm.calls(), 1);
    }

    #[test]
    fn cache_off_asks_every_time() {
        let store = GlossaryStore::empty();
        let llm = xqz_llm();
        let mut r = Resolver::new(&store, Some(&llm));
        r.cache_enabled = false;
        for _ in 0..3 {
            let out = r.resolve(&[], &["XQZ".into()], "").unwrap();
            assert_eq!(out.terms[0].source, TermSource::Llm);
        }
        assert_eq!(llm.calls(), 3);
        assert!(store.is_empty());
    }

    #[test]
    fn llm_down_leaves_terms_unresolved() {
        let store = GlossaryStore::seeded();
        let llm = StubLlm::unavailable();
        let r = Resolver::new(&store, Some(&llm));
        let out = r.resolve(&[span("CPU")], &["XQZ".into()], "").unwrap();
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.unresolved, ["XQZ"]);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn declined_candidates_dropped() {
        let store = GlossaryStore::empty();
        let llm = xqz_llm();
        let r = Resolver::new(&store, Some(&llm));
        let out = r.resolve(&[], &["HELLO".into(), "XQZ".into()], "").unwrap();
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.declined, ["HELLO"]);
        assert_eq!(out.llm_calls, 1);
    }

    #[test]
    fn curated_conflict_is_a_warning() {
        // The LLM defines a key that is curated in the store under another
        // route (here: asked as a candidate).
        let store = GlossaryStore::seeded();
        let llm = StubLlm::new(StubVerdict::Always(true)).with_definition("CPU", "x", "y");
        let r = Resolver::new(&store, Some(&llm));
        let out = r.resolve(&[], &["CPU".into()], "").unwrap();
        assert_eq!(out.terms[0].source, TermSource::Llm);
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(store.get_entry("CPU").unwrap().origin, Origin::Curated);
    }

    #[test]
    fn memo_serves_repeat_keys() {
        let store = GlossaryStore::seeded();
        let memo = TermMemo::new();
        let mut r = Resolver::new(&store, None);
        r.memo = Some(&memo);
        assert_eq!(r.resolve(&[span("CPU")], &[], "").unwrap().terms[0].source, TermSource::Dictionary);
        assert_eq!(r.resolve(&[span("cpu")], &[], "").unwrap().terms[0].source, TermSource::Cache);
    }

    #[test]
    fn duplicate_keys_resolved_once() {
        let store = GlossaryStore::seeded();
        let r = Resolver::new(&store, None);
        let ms = find_matches("CPU cpu Cpu", &KeySet::new(["CPU"]));
        assert_eq!(ms.len(), 3);
        assert_eq!(r.resolve(&ms, &[], "").unwrap().terms.len(), 1);
    }

    #[test]
    fn glossary_failure_is_fatal() {
        struct Down;
        impl GlossaryClient for Down {
            fn list_keys(&self) -> Result<KeySet, GlossaryError> {
                Err(GlossaryError::Unreachable("down".into()))
            }
            fn get_entry(&self, _: &str) -> Result<Option<GlossaryEntry>, GlossaryError> {
                Err(GlossaryError::Unreachable("down".into()))
            }
            fn upsert_cached(&self, _: GlossaryEntry) -> Result<GlossaryEntry, GlossaryError> {
                Err(GlossaryError::Unreachable("down".into()))
            }
        }
        let r = Resolver::new(&Down, None);
        assert!(matches!(
            r.resolve(&[span("CPU")], &[], ""),
            Err(GlossaryError::Unreachable(_))
        ));
    }

    #[test]
    fn tooltip_format() {
        let t = ResolvedTerm {
            key: "CPU".into(),
            expansion: "Central Processing Unit".into(),
            definition: "The main processor.".into(),
            source: TermSource::Dictionary,
        };
        assert_eq!(t.tooltip(), "Central Processing Unit \u{2014} The main processor.");
    }
}
