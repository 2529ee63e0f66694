//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use acro_core::glossary::GlossaryStore;
use acro_core::resolve::{ResolvedTerm, TermSource};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus")
}

/// A bundled page by file name.
pub fn page(name: &str) -> String {
    let path = corpus_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

/// Seed dictionary entries as resolved terms, ready to annotate with.
pub fn seed_terms() -> Vec<ResolvedTerm> {
    GlossaryStore::seeded()
        .entries()
        .into_iter()
        .map(|e| ResolvedTerm {
            key: e.key,
            expansion: e.expansion,
            definition: e.definition,
            source: TermSource::Dictionary,
        })
        .collect()
}

/// Deterministic pseudo-latencies in milliseconds, spread around `center`.
pub fn samples(n: usize, center: f64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15_u64;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            center * (0.5 + (state % 1000) as f64 / 1000.0)
        })
        .collect()
}
