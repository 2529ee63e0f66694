use std::io::Read;
use std::sync::Arc;

use acro_core::config::PipelineConfig;
use acro_core::content::SourceDocument;
use acro_core::glossary::{GlossaryEntry, Origin};
use acro_core::pipeline::Pipeline;

use crate::error::{CliError, CliResult, ExitKind};
use crate::setup::{self, Glossary, Providers};
use crate::Io;

/// Raw bytes of `input`, a path or `-` for stdin.
pub fn read_input(input: &str, stdin: &mut dyn Read) -> CliResult<Vec<u8>> {
    let mut bytes = Vec::new();
    if input == "-" {
        stdin
            .read_to_end(&mut bytes)
            .map_err(|e| CliError::new(ExitKind::Input, e).context("cannot read stdin"))?;
    } else {
        bytes = std::fs::read(input)
            .map_err(|e| CliError::new(ExitKind::Input, e).context(format!("cannot read {input}")))?;
    }
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(CliError::input(format!("{input}: input is empty")));
    }
    Ok(bytes)
}

fn load_document(input: &str, stdin: &mut dyn Read) -> CliResult<(Vec<u8>, SourceDocument)> {
    let bytes = read_input(input, stdin)?;
    let doc = SourceDocument::from_bytes(input, bytes.clone())?;
    Ok((bytes, doc))
}

fn build_pipeline(cfg: &PipelineConfig) -> CliResult<Pipeline> {
    let glossary = Glossary::open(cfg)?;
    let providers = Providers::build(cfg)?;
    setup::pipeline(cfg, glossary.client(), &providers)
}

pub fn annotate(cfg: &PipelineConfig, input: &str, io: &mut Io<'_>) -> CliResult<()> {
    let (raw, doc) = load_document(input, io.stdin)?;
    let pipeline = build_pipeline(cfg)?;
    let out = pipeline.run(&doc)?;
    let verdict = &out.classification;
    for d in &verdict.degraded {
        writeln!(io.stderr, "warning: degraded classification: {d}")?;
    }
    let Some(annotated) = out.annotated else {
        // Byte-identical passthrough so the gate is observable.
        io.stdout.write_all(&raw)?;
        writeln!(io.stderr, "skipped: not tech ({})", verdict.decided_by)?;
        return Ok(());
    };
    io.stdout.write_all(annotated.tree.to_html().as_bytes())?;

    let resolution = out.resolution.unwrap_or_default();
    writeln!(
        io.stderr,
        "tech ({}): {} terms, {} wrappers",
        verdict.decided_by,
        annotated.annotations.len(),
        annotated.total()
    )?;
    for (key, n) in &annotated.annotations {
        let term = resolution.terms.iter().find(|t| &t.key == key);
        let (source, expansion) = term
            .map(|t| (t.source.to_string(), t.expansion.as_str()))
            .unwrap_or_default();
        writeln!(io.stderr, "  {key}\t{n}\t{source}\t{expansion}")?;
    }
    if !resolution.unresolved.is_empty() {
        writeln!(io.stderr, "unresolved: {}", resolution.unresolved.join(", "))?;
    }
    for w in &resolution.warnings {
        writeln!(io.stderr, "warning: {w}")?;
    }
    Ok(())
}

pub fn classify(cfg: &PipelineConfig, input: &str, json: bool, io: &mut Io<'_>) -> CliResult<()> {
    let (_, doc) = load_document(input, io.stdin)?;
    // Classification never needs the glossary.
    let providers = Providers::build(cfg)?;
    let pipeline = setup::pipeline(cfg, Arc::new(acro_core::GlossaryStore::empty()), &providers)?;
    let (_, c) = pipeline.classify_document(&doc)?;
    for d in &c.degraded {
        writeln!(io.stderr, "warning: degraded classification: {d}")?;
    }
    if json {
        serde_json::to_writer_pretty(&mut *io.stdout, &c).map_err(|e| CliError::new(ExitKind::Input, e))?;
        writeln!(io.stdout)?;
    } else {
        let label = if c.is_tech { "tech" } else { "non-tech" };
        writeln!(io.stdout, "{label} {}", c.decided_by)?;
    }
    Ok(())
}

pub fn search(cfg: &PipelineConfig, query: &str, limit: u64, json: bool, io: &mut Io<'_>) -> CliResult<()> {
    let results = Glossary::open(cfg)?.search(query, limit)?;
    if json {
        serde_json::to_writer_pretty(&mut *io.stdout, &results).map_err(|e| CliError::new(ExitKind::Input, e))?;
        writeln!(io.stdout)?;
        return Ok(());
    }
    if results.is_empty() {
        writeln!(io.stderr, "no matches for {query:?}")?;
    }
    for e in results {
        writeln!(io.stdout, "{}\t{}\t{}", e.key, e.expansion, e.definition)?;
    }
    Ok(())
}

fn writable_glossary(cfg: &PipelineConfig) -> CliResult<Glossary> {
    let g = Glossary::open(cfg)?;
    if !g.is_persistent() {
        return Err(CliError::config(
            "this command changes the glossary; pass --store or --glossary-url",
        ));
    }
    Ok(g)
}

pub fn contribute(cfg: &PipelineConfig, key: &str, expansion: &str, definition: &str, io: &mut Io<'_>) -> CliResult<()> {
    let g = writable_glossary(cfg)?;
    let id = g.submit_contribution(GlossaryEntry::new(key, expansion, definition, Origin::PendingContribution))?;
    writeln!(io.stdout, "{id}")?;
    writeln!(io.stderr, "contribution {id} is pending review")?;
    Ok(())
}

pub fn approve(cfg: &PipelineConfig, id: u64, io: &mut Io<'_>) -> CliResult<()> {
    let g = writable_glossary(cfg)?;
    let e = g.approve_contribution(id)?;
    writeln!(io.stdout, "{}\t{}\t{}", e.key, e.expansion, e.definition)?;
    Ok(())
}

pub fn pending(cfg: &PipelineConfig, json: bool, io: &mut Io<'_>) -> CliResult<()> {
    let list = Glossary::open(cfg)?.pending()?;
    if json {
        serde_json::to_writer_pretty(&mut *io.stdout, &list).map_err(|e| CliError::new(ExitKind::Input, e))?;
        writeln!(io.stdout)?;
    } else {
        for c in list {
            writeln!(io.stdout, "{}\t{}\t{}\t{}", c.id, c.entry.key, c.entry.expansion, c.entry.definition)?;
        }
    }
    Ok(())
}
