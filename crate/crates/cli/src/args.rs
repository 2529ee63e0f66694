use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

/// Detect acronyms in HTML pages and annotate them with definitions.
#[derive(Debug, Parser)]
#[command(name = "acro", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Use the deterministic offline providers (the default).
    #[arg(long, global = true, conflicts_with = "live")]
    pub offline: bool,
    /// Use the live taxonomy and LLM services; keys come from the environment.
    #[arg(long, global = true)]
    pub live: bool,
    /// Base URL of a running glossary service.
    #[arg(long, global = true, value_name = "URL", conflicts_with = "store")]
    pub glossary_url: Option<String>,
    /// JSON-lines glossary file; created from the seed dictionary if missing.
    #[arg(long, global = true, value_name = "PATH")]
    pub store: Option<PathBuf>,
    /// Do not write LLM definitions back to the glossary.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate an HTML page; writes HTML to stdout and a summary to stderr.
    Annotate {
        /// Input file, or `-` for stdin.
        input: String,
    },
    /// Print `tech|non-tech <decided_by>` for a page.
    Classify {
        input: String,
        /// Print the full classification as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Search the glossary.
    Search {
        #[arg(default_value = "")]
        query: String,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        #[arg(long)]
        json: bool,
    },
    /// Serve the glossary HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Time the dictionary and LLM paths and print a comparison table.
    Bench(BenchArgs),
    /// Submit a definition for review.
    Contribute {
        #[arg(long)]
        key: String,
        #[arg(long)]
        expansion: String,
        #[arg(long)]
        definition: String,
    },
    /// Approve a pending contribution by id.
    Approve { id: u64 },
    /// List pending contributions.
    Pending {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    pub input: String,
    /// Number of sequential runs per method.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    /// Injected latency per remote call, e.g. `dictionary=2135,llm=16429`
    /// (milliseconds, simulated on a virtual clock).
    #[arg(long, value_name = "TARGET=MS", value_delimiter = ',', value_parser = parse_latency)]
    pub simulate_latency: Vec<(LatencyTarget, Duration)>,
    /// Reuse one pipeline (and its term memo) across runs.
    #[arg(long)]
    pub warm: bool,
    /// Omit the manual-search reference row.
    #[arg(long)]
    pub no_manual: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LatencyTarget {
    Dictionary,
    Llm,
    Taxonomy,
}

impl LatencyTarget {
    pub fn name(self) -> &'static str {
        match self {
            LatencyTarget::Dictionary => "dictionary",
            LatencyTarget::Llm => "llm",
            LatencyTarget::Taxonomy => "taxonomy",
        }
    }
}

pub fn parse_latency(s: &str) -> Result<(LatencyTarget, Duration), String> {
    let (name, ms) = s
        .split_once('=')
        .ok_or_else(|| format!("expected TARGET=MS, got {s:?}"))?;
    let target = match name.trim() {
        "dictionary" => LatencyTarget::Dictionary,
        "llm" => LatencyTarget::Llm,
        "taxonomy" => LatencyTarget::Taxonomy,
        other => return Err(format!("unknown latency target {other:?} (dictionary, llm, taxonomy)")),
    };
    let ms: f64 = ms
        .trim()
        .parse()
        .map_err(|_| format!("latency for {name} is not a number: {ms:?}"))?;
    if !ms.is_finite() || ms < 0.0 {
        return Err(format!("latency for {name} must be a non-negative number"));
    }
    Ok((target, Duration::from_secs_f64(ms / 1000.0)))
}
