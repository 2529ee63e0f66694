use thiserror::Error;

/// Failures of the content pipeline (sanitize, extract, classify).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("input is not recoverable as markup: {0}")]
    ParseFailure(String),
    #[error("document is empty after removing noise elements")]
    EmptyDocument,
    #[error("no candidate block has enough text to be the main content")]
    NoContent,
    #[error("cannot classify empty text")]
    EmptyText,
    #[error("all classifier providers failed: {0}")]
    AllProvidersFailed(String),
    #[error(transparent)]
    Glossary(#[from] GlossaryError),
}

/// Failures reported by a taxonomy or LLM backend.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("provider timed out after {0} ms")]
    Timeout(u64),
    #[error("unparseable provider response: {0:?}")]
    BadResponse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlossaryError {
    #[error("no entry for key {0:?}")]
    NotFound(String),
    #[error("key {0:?} is curated and cannot be overwritten by a cached definition")]
    ConflictCurated(String),
    #[error("invalid entry: {0}")]
    ValidationFailed(String),
    #[error("no pending contribution with id {0}")]
    UnknownContribution(u64),
    #[error("glossary unreachable: {0}")]
    Unreachable(String),
    #[error("glossary store unavailable: {0}")]
    StoreUnavailable(String),
    #[error("corrupt store at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

/// Configuration that cannot be used as given.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);
