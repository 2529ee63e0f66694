use std::fmt;

use acro_core::error::{ConfigError, GlossaryError, PipelineError};
use acro_core::timing::BenchError;

/// Process exit codes. Stable; documented in the README.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    /// Unreadable, empty or unparseable input; rejected request data.
    Input = 1,
    /// Glossary unreachable or its store unusable; port bind failure.
    Unavailable = 2,
    /// Invalid configuration or command-line usage.
    Config = 3,
    /// Every classification provider failed.
    Provider = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(kind: ExitKind, error: impl Into<anyhow::Error>) -> Self {
        CliError {
            kind,
            error: error.into(),
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::Input, anyhow::anyhow!("{msg}"))
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::Config, ConfigError(msg.to_string()))
    }

    pub fn is_broken_pipe(&self) -> bool {
        self.error
            .chain()
            .filter_map(|c| c.downcast_ref::<std::io::Error>())
            .any(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    }

    pub fn code(&self) -> u8 {
        self.kind as u8
    }

    pub fn context(self, ctx: impl fmt::Display + Send + Sync + 'static) -> Self {
        CliError {
            kind: self.kind,
            error: self.error.context(ctx),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub fn glossary_kind(e: &GlossaryError) -> ExitKind {
    match e {
        GlossaryError::Unreachable(_)
        | GlossaryError::StoreUnavailable(_)
        | GlossaryError::Corrupt { .. } => ExitKind::Unavailable,
        GlossaryError::NotFound(_)
        | GlossaryError::ConflictCurated(_)
        | GlossaryError::ValidationFailed(_)
        | GlossaryError::UnknownContribution(_) => ExitKind::Input,
    }
}

impl From<GlossaryError> for CliError {
    fn from(e: GlossaryError) -> Self {
        CliError::new(glossary_kind(&e), e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::new(ExitKind::Config, e)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let kind = match &e {
            PipelineError::Glossary(g) => glossary_kind(g),
            PipelineError::AllProvidersFailed(_) => ExitKind::Provider,
            PipelineError::ParseFailure(_)
            | PipelineError::EmptyDocument
            | PipelineError::NoContent
            | PipelineError::EmptyText => ExitKind::Input,
        };
        CliError::new(kind, e)
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Run { run, source } => {
                CliError::from(source).context(format!("benchmark run {run} failed"))
            }
            BenchError::Setup { .. } => CliError::new(ExitKind::Config, e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(ExitKind::Input, e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
