//! The `acro` command-line tool and glossary service.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod live;
pub mod remote;
pub mod server;
pub mod setup;

use std::io::{Read, Write};
use std::num::NonZeroUsize;
use std::sync::Arc;

use acro_core::content::SourceDocument;
use acro_core::glossary::GlossaryStore;

use crate::args::{Cli, Command};
use crate::bench::{BenchPlan, Latencies};
use crate::error::{CliError, CliResult, ExitKind};
use crate::setup::{Glossary, Providers};

/// Process streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

pub fn run(cli: Cli, io: &mut Io<'_>) -> CliResult<()> {
    let cfg = setup::load_config(&cli.global)?;
    match cli.command {
        Command::Annotate { input } => commands::annotate(&cfg, &input, io),
        Command::Classify { input, json } => commands::classify(&cfg, &input, json, io),
        Command::Search { query, limit, json } => commands::search(&cfg, &query, limit, json, io),
        Command::Contribute {
            key,
            expansion,
            definition,
        } => commands::contribute(&cfg, &key, &expansion, &definition, io),
        Command::Approve { id } => commands::approve(&cfg, id, io),
        Command::Pending { json } => commands::pending(&cfg, json, io),
        Command::Bench(b) => {
            let bytes = commands::read_input(&b.input, io.stdin)?;
            let doc = SourceDocument::from_bytes(b.input.clone(), bytes)?;
            let plan = BenchPlan {
                runs: NonZeroUsize::new(b.runs as usize).ok_or_else(|| CliError::config("--runs must be at least 1"))?,
                latency: Latencies::from_pairs(&b.simulate_latency),
                warm: b.warm,
                include_manual: !b.no_manual,
            };
            let report = bench::run_bench(&cfg, &doc, &plan)?;
            if b.json {
                serde_json::to_writer_pretty(&mut *io.stdout, &report)
                    .map_err(|e| CliError::new(ExitKind::Input, e))?;
                writeln!(io.stdout)?;
            } else {
                write!(io.stdout, "{report}")?;
            }
            Ok(())
        }
        Command::Serve { port, host } => serve(&cfg, &host, port, io),
    }
}

fn serve(cfg: &acro_core::PipelineConfig, host: &str, port: u16, io: &mut Io<'_>) -> CliResult<()> {
    let store = match Glossary::open(cfg)? {
        Glossary::Local(s) => s,
        Glossary::Remote(_) => {
            return Err(CliError::config("serve needs a local store, not --glossary-url"));
        }
    };
    let providers = Providers::build(cfg)?;
    let pipeline = setup::pipeline(cfg, Arc::new(GlossaryStore::empty()), &providers)?;
    let state = server::AppState {
        store,
        pipeline: Arc::new(pipeline),
    };
    // Held here so blocking HTTP clients inside are dropped outside the runtime.
    let keep = state.clone();

    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::new(ExitKind::Unavailable, e))?;
    let result = rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::new(ExitKind::Unavailable, e).context(format!("cannot bind {host}:{port}")))?;
        let addr = listener.local_addr()?;
        writeln!(io.stderr, "listening on http://{addr}")?;
        io.stderr.flush()?;
        server::serve(listener, state)
            .await
            .map_err(|e| CliError::new(ExitKind::Unavailable, e))
    });
    drop(rt);
    drop(keep);
    result
}
