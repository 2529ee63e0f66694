//! Acronym detection and annotation for web pages.
//!
//! A page goes through four phases: noise removal and main-content
//! extraction, technology classification, term detection and resolution
//! against a glossary (with an LLM fallback), and inline annotation.

pub mod annotate;
pub mod classify;
pub mod clock;
pub mod config;
pub mod content;
pub mod dom;
pub mod error;
pub mod glossary;
pub mod matcher;
pub mod oracle;
pub mod pipeline;
pub mod prompt;
pub mod provider;
pub mod resolve;
pub mod text;
pub mod timing;

pub use annotate::{annotate, strip_annotations, AnnotatedDocument, AnnotationPolicy};
pub use classify::{CategoryLabel, ClassifierChain, DecidedBy, PageClassification};
pub use clock::{Clock, FakeClock, MonotonicClock, SimulatedLatencyClock};
pub use config::{PipelineConfig, ProviderMode};
pub use content::{
    extract_main_content, sanitize, ExtractedArticle, NoiseSelectorList, Selector, SourceDocument,
};
pub use dom::{parse_html, Element, MarkupTree, Node};
pub use error::{ConfigError, GlossaryError, PipelineError, ProviderError};
pub use glossary::{Contribution, GlossaryClient, GlossaryEntry, GlossaryStore, Origin};
pub use matcher::{discover_candidates, find_matches, KeyMatcher, KeySet, MatchOptions, MatchSpan};
pub use pipeline::{AnnotateTarget, Classifier, Phase, Pipeline, PipelineOutcome};
pub use provider::{LlmProvider, TaxonomyProvider};
pub use resolve::{ResolveOutcome, ResolvedTerm, Resolver, TermMemo, TermSource};
pub use timing::{compare, summarize, time_pipeline, ComparisonReport, Stats, TimingSample};
