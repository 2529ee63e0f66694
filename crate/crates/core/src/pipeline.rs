//! The four phases wired together: sanitize and extract, classify, detect
//! and resolve terms, annotate.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::annotate::{annotate, AnnotatedDocument, AnnotationPolicy};
use crate::classify::{stub_classify, ClassifierChain, PageClassification, DEFAULT_MAX_CHARS};
use crate::content::{
    extract_main_content, sanitize, sanitize_tree, ExtractedArticle, NoiseSelectorList, SourceDocument,
};
use crate::dom::{parse_html, MarkupTree};
use crate::error::PipelineError;
use crate::glossary::GlossaryClient;
use crate::matcher::{discover_candidates, KeyMatcher, KeySet, MatchSpan};
use crate::provider::LlmProvider;
use crate::resolve::{ResolveOutcome, Resolver, TermMemo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Sanitize,
    Extract,
    Classify,
    Match,
    Resolve,
    Annotate,
    Total,
}

impl Phase {
    pub const STAGES: [Phase; 6] = [
        Phase::Sanitize,
        Phase::Extract,
        Phase::Classify,
        Phase::Match,
        Phase::Resolve,
        Phase::Annotate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Sanitize => "sanitize",
            Phase::Extract => "extract",
            Phase::Classify => "classify",
            Phase::Match => "match",
            Phase::Resolve => "resolve",
            Phase::Annotate => "annotate",
            Phase::Total => "total",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub enum Classifier {
    /// Offline keyword heuristic.
    Keywords(KeySet),
    Chain(ClassifierChain),
}

impl Classifier {
    pub fn classify(&self, text: &str) -> Result<PageClassification, PipelineError> {
        match self {
            Classifier::Keywords(seeds) => Ok(stub_classify(text, seeds)),
            Classifier::Chain(chain) => chain.classify(text),
        }
    }
}

/// Which tree receives the annotations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotateTarget {
    /// The document with noise elements removed.
    #[default]
    Sanitized,
    /// The document as parsed, noise included; the annotation policy alone
    /// keeps scripts, links and the like untouched.
    Original,
}

pub struct Pipeline {
    pub selectors: NoiseSelectorList,
    pub classifier: Classifier,
    pub glossary: Arc<dyn GlossaryClient>,
    /// Used for definitions of keys the glossary lacks.
    pub llm: Option<Arc<dyn LlmProvider>>,
    pub policy: AnnotationPolicy,
    pub cache_enabled: bool,
    /// Send acronym-shaped unknown tokens to the LLM.
    pub discover: bool,
    pub target: AnnotateTarget,
    pub max_chars: usize,
    pub memo: Option<TermMemo>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub classification: PageClassification,
    pub article_text: String,
    pub matches: Vec<MatchSpan>,
    pub resolution: Option<ResolveOutcome>,
    /// `None` when the page is not technology-related.
    pub annotated: Option<AnnotatedDocument>,
}

impl PipelineOutcome {
    pub fn is_tech(&self) -> bool {
        self.classification.is_tech
    }
}

impl Pipeline {
    pub fn new(glossary: Arc<dyn GlossaryClient>) -> Self {
        Pipeline {
            selectors: NoiseSelectorList::default(),
            classifier: Classifier::Keywords(crate::classify::default_tech_seeds()),
            glossary,
            llm: None,
            policy: AnnotationPolicy::default(),
            cache_enabled: true,
            discover: true,
            target: AnnotateTarget::default(),
            max_chars: DEFAULT_MAX_CHARS,
            memo: None,
        }
    }

    /// Sanitize, extract and classify only; the glossary is not touched.
    pub fn classify_document(
        &self,
        doc: &SourceDocument,
    ) -> Result<(ExtractedArticle, PageClassification), PipelineError> {
        let sanitized = sanitize(doc, &self.selectors)?;
        let article = extract_main_content(&sanitized)?;
        let classification = self.classifier.classify(&article.clean_text)?;
        Ok((article, classification))
    }

    pub fn run(&self, doc: &SourceDocument) -> Result<PipelineOutcome, PipelineError> {
        self.run_observed(doc, &mut |_| {})
    }

    /// Run all phases, calling `on_phase` as each one completes. Phases
    /// after classification are skipped for non-technical pages.
    pub fn run_observed(
        &self,
        doc: &SourceDocument,
        on_phase: &mut dyn FnMut(Phase),
    ) -> Result<PipelineOutcome, PipelineError> {
        if doc.html.trim().is_empty() {
            return Err(PipelineError::EmptyDocument);
        }
        let parsed = parse_html(&doc.html)?;
        let original = match self.target {
            AnnotateTarget::Original => Some(parsed.clone()),
            AnnotateTarget::Sanitized => None,
        };
        let sanitized = sanitize_tree(parsed, &self.selectors)?;
        on_phase(Phase::Sanitize);

        let article = extract_main_content(&sanitized)?;
        on_phase(Phase::Extract);

        let classification = self.classifier.classify(&article.clean_text)?;
        on_phase(Phase::Classify);
        if !classification.is_tech {
            return Ok(PipelineOutcome {
                classification,
                article_text: article.clean_text,
                matches: Vec::new(),
                resolution: None,
                annotated: None,
            });
        }

        let keys = self.glossary.list_keys()?;
        let matcher = KeyMatcher::new(&keys, self.policy.match_options);
        let matches = matcher.find(&article.clean_text);
        on_phase(Phase::Match);

        let candidates = if self.discover && self.llm.is_some() {
            discover_candidates(&article.clean_text, &keys)
        } else {
            Vec::new()
        };
        let resolver = Resolver {
            glossary: self.glossary.as_ref(),
            llm: self.llm.as_deref(),
            cache_enabled: self.cache_enabled,
            max_chars: self.max_chars,
            memo: self.memo.as_ref(),
        };
        let resolution = resolver.resolve(&matches, &candidates, &article.clean_text)?;
        on_phase(Phase::Resolve);

        let tree: &MarkupTree = original.as_ref().unwrap_or(&sanitized);
        let annotated = annotate(tree, &resolution.terms, &self.policy);
        on_phase(Phase::Annotate);

        Ok(PipelineOutcome {
            classification,
            article_text: article.clean_text,
            matches,
            resolution: Some(resolution),
            annotated: Some(annotated),
        })
    }
}
