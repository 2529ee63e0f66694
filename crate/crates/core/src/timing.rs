//! Benchmark harness: repeated timed pipeline runs, descriptive
//! statistics, and a method comparison table.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::Clock;
use crate::content::SourceDocument;
use crate::error::PipelineError;
use crate::pipeline::{Phase, Pipeline};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingSample {
    /// Zero-based run index.
    pub run: usize,
    pub phase: Phase,
    pub duration_ms: f64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("run {run} failed: {source}")]
    Run {
        run: usize,
        #[source]
        source: PipelineError,
    },
    #[error("building the pipeline for run {run} failed: {message}")]
    Setup { run: usize, message: String },
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1_000.0
}

/// Run the pipeline `runs` times, one after another on this thread,
/// recording each completed phase and the run total.
///
/// Cold mode (`warm == false`) builds a fresh pipeline for every run;
/// construction is not timed. Warm mode builds one and reuses it.
pub fn time_pipeline<F>(
    doc: &SourceDocument,
    mut build: F,
    clock: &dyn Clock,
    runs: NonZeroUsize,
    warm: bool,
) -> Result<Vec<TimingSample>, BenchError>
where
    F: FnMut() -> Result<Pipeline, String>,
{
    let mut samples = Vec::with_capacity(runs.get() * 7);
    let mut shared: Option<Pipeline> = None;
    for run in 0..runs.get() {
        let fresh;
        let pipeline = if warm {
            if shared.is_none() {
                shared = Some(build().map_err(|message| BenchError::Setup { run, message })?);
            }
            shared.as_ref().expect("built above")
        } else {
            fresh = build().map_err(|message| BenchError::Setup { run, message })?;
            &fresh
        };

        let start = clock.now();
        let mut last = start;
        let mut run_samples = Vec::with_capacity(7);
        pipeline
            .run_observed(doc, &mut |phase| {
                let now = clock.now();
                run_samples.push(TimingSample {
                    run,
                    phase,
                    duration_ms: ms(now.saturating_sub(last)),
                });
                last = now;
            })
            .map_err(|source| BenchError::Run { run, source })?;
        run_samples.push(TimingSample {
            run,
            phase: Phase::Total,
            duration_ms: ms(last.saturating_sub(start)),
        });
        samples.extend(run_samples);
    }
    Ok(samples)
}

/// Durations grouped by phase, in phase order.
pub fn by_phase(samples: &[TimingSample]) -> BTreeMap<Phase, Vec<f64>> {
    let mut out: BTreeMap<Phase, Vec<f64>> = BTreeMap::new();
    for s in samples {
        out.entry(s.phase).or_default().push(s.duration_ms);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n - 1 denominator); 0 when n == 1.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("cannot summarize an empty sample")]
    EmptyInput,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

pub fn summarize(samples: &[f64]) -> Result<Stats, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[n - 1]);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        sorted[n / 2 - 1] / 2.0 + sorted[n / 2] / 2.0
    };
    // Rounding can push the mean of near-equal values just outside the
    // sample's range.
    let mean = (samples.iter().sum::<f64>() / n as f64).clamp(min, max);
    let sd = if n == 1 {
        0.0
    } else {
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(Stats {
        n,
        mean,
        median,
        sd,
        min,
        max,
        range: max - min,
    })
}

/// The manual web-search baseline (reference constant, n = 25 people).
pub const MANUAL_SEARCH_BASELINE: Stats = Stats {
    n: 25,
    mean: 17_200.0,
    median: 16_000.0,
    sd: 4_717.0,
    min: 12_000.0,
    max: 34_000.0,
    range: 22_000.0,
};

/// One row of the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub n: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub sd_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl MethodRow {
    pub fn new(method: impl Into<String>, s: &Stats) -> Self {
        MethodRow {
            method: method.into(),
            n: s.n,
            mean_ms: s.mean,
            median_ms: s.median,
            sd_ms: s.sd,
            min_ms: s.min,
            max_ms: s.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<MethodRow>,
    /// LLM-path mean divided by dictionary-path mean.
    pub speedup: Option<f64>,
}

pub const DICTIONARY_METHOD: &str = "Dictionary";
pub const LLM_METHOD: &str = "LLM";
pub const MANUAL_METHOD: &str = "Manual search (reference)";

pub fn compare(dictionary: &Stats, llm: &Stats, manual: Option<&Stats>) -> ComparisonReport {
    let mut rows = vec![
        MethodRow::new(DICTIONARY_METHOD, dictionary),
        MethodRow::new(LLM_METHOD, llm),
    ];
    if let Some(m) = manual {
        rows.push(MethodRow::new(MANUAL_METHOD, m));
    }
    let speedup = (dictionary.mean > 0.0).then(|| llm.mean / dictionary.mean);
    ComparisonReport { rows, speedup }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .map(|r| r.method.chars().count())
            .max()
            .unwrap_or(6)
            .max(6);
        writeln!(
            f,
            "{:<width$}  {:>4}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}",
            "Method", "n", "Mean", "Median", "SD", "Min", "Max"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<width$}  {:>4}  {:>10.1}  {:>10.1}  {:>10.1}  {:>10.1}  {:>10.1}",
                r.method, r.n, r.mean_ms, r.median_ms, r.sd_ms, r.min_ms, r.max_ms
            )?;
        }
        match self.speedup {
            Some(s) => writeln!(f, "Dictionary path is {s:.2}x faster than the LLM path (mean ms)."),
            None => writeln!(f, "Speedup undefined (dictionary mean is zero)."),
        }
    }
}
