//! Dictionary-path versus LLM-path timing.
//!
//! The dictionary path resolves every term from the glossary and never asks
//! the LLM for definitions. The LLM path starts from an empty glossary and
//! sends every acronym-shaped token to the LLM in one batched call. With
//! simulated latency the injected delays are charged to a virtual clock, so
//! a 16 s "call" costs no real time.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::Duration;

use acro_core::clock::{Clock, MonotonicClock, SimulatedLatencyClock};
use acro_core::config::{PipelineConfig, ProviderMode};
use acro_core::content::SourceDocument;
use acro_core::glossary::{GlossaryClient, GlossaryStore};
use acro_core::pipeline::{Phase, Pipeline};
use acro_core::prompt::LlmDefinition;
use acro_core::provider::{Delayed, LlmProvider, TaxonomyProvider};
use acro_core::resolve::TermMemo;
use acro_core::timing::{
    by_phase, compare, summarize, time_pipeline, ComparisonReport, Stats, DICTIONARY_METHOD, LLM_METHOD,
    MANUAL_SEARCH_BASELINE,
};
use serde::Serialize;

use crate::args::LatencyTarget;
use crate::error::{CliError, CliResult, ExitKind};
use crate::setup::{self, Glossary, Providers};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Latencies {
    pub dictionary: Duration,
    pub llm: Duration,
    pub taxonomy: Duration,
}

impl Latencies {
    pub fn from_pairs(pairs: &[(LatencyTarget, Duration)]) -> Option<Self> {
        if pairs.is_empty() {
            return None;
        }
        let mut l = Latencies::default();
        for &(target, d) in pairs {
            match target {
                LatencyTarget::Dictionary => l.dictionary = d,
                LatencyTarget::Llm => l.llm = d,
                LatencyTarget::Taxonomy => l.taxonomy = d,
            }
        }
        Some(l)
    }

    fn as_ms(&self) -> BTreeMap<&'static str, f64> {
        [
            (LatencyTarget::Dictionary, self.dictionary),
            (LatencyTarget::Llm, self.llm),
            (LatencyTarget::Taxonomy, self.taxonomy),
        ]
        .into_iter()
        .filter(|(_, d)| !d.is_zero())
        .map(|(t, d)| (t.name(), d.as_secs_f64() * 1000.0))
        .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub runs: NonZeroUsize,
    pub latency: Option<Latencies>,
    pub warm: bool,
    pub include_manual: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub runs: usize,
    pub warm: bool,
    /// Injected per-call latencies; absent when nothing was simulated.
    pub simulated_latency_ms: Option<BTreeMap<&'static str, f64>>,
    #[serde(flatten)]
    pub comparison: ComparisonReport,
    /// Per-method, per-phase statistics.
    pub phases: BTreeMap<&'static str, BTreeMap<Phase, Stats>>,
}

fn delayed_llm(llm: Arc<dyn LlmProvider>, d: Duration, clock: &Arc<dyn Clock>) -> Arc<dyn LlmProvider> {
    if d.is_zero() {
        llm
    } else {
        Arc::new(Delayed::new(llm, d, clock.clone()))
    }
}

fn delayed_taxonomy(t: Arc<dyn TaxonomyProvider>, d: Duration, clock: &Arc<dyn Clock>) -> Arc<dyn TaxonomyProvider> {
    if d.is_zero() {
        t
    } else {
        Arc::new(Delayed::new(t, d, clock.clone()))
    }
}

fn delayed_glossary(g: Arc<dyn GlossaryClient>, d: Duration, clock: &Arc<dyn Clock>) -> Arc<dyn GlossaryClient> {
    if d.is_zero() {
        g
    } else {
        Arc::new(Delayed::new(g, d, clock.clone()))
    }
}

/// Offline runs give the stub LLM the seed dictionary, so the LLM path
/// resolves the same terms the dictionary path does.
fn bench_providers(cfg: &PipelineConfig) -> CliResult<Providers> {
    match cfg.mode {
        ProviderMode::Live => Ok(Providers::build(cfg)?),
        ProviderMode::Offline => {
            let seed = GlossaryStore::seeded().entries().into_iter().map(|e| LlmDefinition {
                key: e.key,
                expansion: e.expansion,
                definition: e.definition,
            });
            Ok(Providers::offline(cfg, seed))
        }
    }
}

pub fn run_bench(cfg: &PipelineConfig, doc: &SourceDocument, plan: &BenchPlan) -> CliResult<BenchReport> {
    let latency = plan.latency.unwrap_or_default();
    let clock: Arc<dyn Clock> = if plan.latency.is_some() {
        Arc::new(SimulatedLatencyClock::new())
    } else {
        Arc::new(MonotonicClock::new())
    };
    let base = bench_providers(cfg)?;
    let providers = Providers {
        taxonomy: delayed_taxonomy(base.taxonomy, latency.taxonomy, &clock),
        llm: delayed_llm(base.llm, latency.llm, &clock),
    };
    let dictionary = Glossary::open(cfg)?.client();
    let memo = |p: &mut Pipeline| {
        if plan.warm {
            p.memo = Some(TermMemo::new());
        }
    };

    let dict_build = || -> Result<Pipeline, String> {
        let g = delayed_glossary(dictionary.clone(), latency.dictionary, &clock);
        let mut p = setup::pipeline(cfg, g, &providers).map_err(|e| e.to_string())?;
        p.llm = None;
        memo(&mut p);
        Ok(p)
    };
    let llm_build = || -> Result<Pipeline, String> {
        let mut p = setup::pipeline(cfg, Arc::new(GlossaryStore::empty()), &providers).map_err(|e| e.to_string())?;
        p.discover = true;
        memo(&mut p);
        Ok(p)
    };

    let dict = time_pipeline(doc, dict_build, clock.as_ref(), plan.runs, plan.warm)?;
    let llm = time_pipeline(doc, llm_build, clock.as_ref(), plan.runs, plan.warm)?;

    let mut phases = BTreeMap::new();
    let mut totals = Vec::new();
    for (method, samples) in [(DICTIONARY_METHOD, &dict), (LLM_METHOD, &llm)] {
        let grouped = by_phase(samples);
        let mut per_phase = BTreeMap::new();
        for (phase, xs) in &grouped {
            per_phase.insert(*phase, summarize(xs).map_err(|e| CliError::new(ExitKind::Input, e))?);
        }
        let total = *per_phase
            .get(&Phase::Total)
            .ok_or_else(|| CliError::input("benchmark produced no samples"))?;
        totals.push(total);
        phases.insert(method, per_phase);
    }
    if phases[LLM_METHOD].len() < Phase::STAGES.len() + 1 {
        return Err(CliError::input(
            "the page was classified as non-technical, so the resolve phase never ran; \
             benchmark a technical page",
        ));
    }
    let manual = plan.include_manual.then_some(&MANUAL_SEARCH_BASELINE);
    Ok(BenchReport {
        runs: plan.runs.get(),
        warm: plan.warm,
        simulated_latency_ms: plan.latency.map(|l| l.as_ms()),
        comparison: compare(&totals[0], &totals[1], manual),
        phases,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.simulated_latency_ms {
            Some(l) => {
                let parts: Vec<String> = l.iter().map(|(k, v)| format!("{k}={v:.0} ms")).collect();
                writeln!(f, "Simulated latency (virtual clock, per call): {}", parts.join(", "))?;
            }
            None => writeln!(f, "No simulated latency; local providers only.")?,
        }
        writeln!(
            f,
            "{} runs per method, {} state.\n",
            self.runs,
            if self.warm { "warm" } else { "cold" }
        )?;
        write!(f, "{}", self.comparison)?;
        writeln!(f)?;
        let methods: Vec<&str> = self.phases.keys().copied().collect();
        write!(f, "{:<10}", "Phase mean (ms)")?;
        for m in &methods {
            write!(f, "  {m:>12}")?;
        }
        writeln!(f)?;
        for phase in Phase::STAGES.iter().chain([&Phase::Total]) {
            write!(f, "{:<15}", phase.name())?;
            for m in &methods {
                match self.phases[m].get(phase) {
                    Some(s) => write!(f, "  {:>12.3}", s.mean)?,
                    None => write!(f, "  {:>12}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAGE: &str = "<article><p>The CPU reads from the SSD through a driver API, and the GPU \
        renders frames over HDMI. Software on the computer uses RAM.</p></article>";

    #[test]
    fn simulated_latency_sets_the_ratio() {
        let plan = BenchPlan {
            runs: NonZeroUsize::new(3).unwrap(),
            latency: Some(Latencies {
                dictionary: Duration::from_millis(1000),
                llm: Duration::from_millis(8000),
                taxonomy: Duration::ZERO,
            }),
            warm: false,
            include_manual: true,
        };
        let r = run_bench(&PipelineConfig::default(), &SourceDocument::new("t", PAGE), &plan).unwrap();
        assert_eq!(r.comparison.rows.len(), 3);
        assert_eq!(r.comparison.rows[0].n, 3);
        let ratio = r.comparison.speedup.unwrap();
        assert!((ratio - 8.0).abs() < 0.2, "{ratio}");
        assert!(r.to_string().contains("Dictionary path is"));
    }

    #[test]
    fn non_tech_page_is_rejected() {
        let plan = BenchPlan {
            runs: NonZeroUsize::new(1).unwrap(),
            latency: None,
            warm: false,
            include_manual: false,
        };
        let doc = SourceDocument::new("t", "<p>Whisk the eggs with sugar until pale and fluffy.</p>");
        assert!(run_bench(&PipelineConfig::default(), &doc, &plan).is_err());
    }
}
