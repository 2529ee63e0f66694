//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::{Duration, Instant};

use acro_cli::args::Cli;
use acro_cli::bench::{run_bench, BenchPlan, Latencies};
use acro_cli::server::router;
use acro_cli::Io;
use acro_core::annotate::{annotate, strip_annotations, AnnotationPolicy};
use acro_core::classify::{CategoryLabel, ClassifierChain, DecidedBy};
use acro_core::config::PipelineConfig;
use acro_core::content::SourceDocument;
use acro_core::dom::parse_html;
use acro_core::glossary::{GlossaryEntry, GlossaryStore, Origin};
use acro_core::matcher::{find_matches, KeySet, MatchOptions};
use acro_core::oracle;
use acro_core::pipeline::Pipeline;
use acro_core::provider::{Counted, StubLlm, StubTaxonomy, StubVerdict};
use acro_core::resolve::{ResolvedTerm, TermSource};
use acro_core::timing::summarize;
use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use clap::Parser;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use tower::ServiceExt;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_key(rng: &mut StdRng) -> String {
    const ALPHA: &[char] = &['A', 'B', 'C', 'D', 'P', 'S', 'U', '2', '3'];
    let len = rng.random_range(1..=5);
    (0..len).map(|_| *ALPHA.choose(rng).unwrap()).collect()
}

fn random_text(rng: &mut StdRng, keys: &[String]) -> String {
    const FILLER: &[&str] = &["the", "data", "é", "cpus", "x_y", "3D", "über", "-", "_", "ABCD", "s"];
    const SEP: &[&str] = &[" ", " ", ", ", ".", "-", "/", "_", "\n", ""];
    let limit = rng.random_range(0..=500);
    let mut text = String::new();
    loop {
        let word = if rng.random_bool(0.5) {
            let k = keys.choose(rng).unwrap();
            match rng.random_range(0..4) {
                0 => k.to_lowercase(),
                1 => format!("{k}s"),
                _ => k.clone(),
            }
        } else {
            FILLER.choose(rng).unwrap().to_string()
        };
        let piece = format!("{word}{}", SEP.choose(rng).unwrap());
        if text.chars().count() + piece.chars().count() > limit {
            return text;
        }
        text.push_str(&piece);
    }
}

fn matcher_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(0xAC20);
    let started = Instant::now();
    let (mut mismatches, mut total_matches) = (0, 0);
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let raw: Vec<String> = (0..n).map(|_| random_key(&mut rng)).collect();
        let text = random_text(&mut rng, &raw);
        let keys = KeySet::new(raw);
        let got = find_matches(&text, &keys);
        total_matches += got.len();
        if got != oracle::matches(&text, &keys, MatchOptions::default()) {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("1000 instances, {total_matches} spans, 0 mismatches in {elapsed:.2?}"))
}

fn seed_terms() -> Vec<ResolvedTerm> {
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

fn annotation_round_trip() -> Check {
    let terms = seed_terms();
    let corpus = common::corpus();
    ensure(corpus.len() >= 20, format!("only {} fixtures", corpus.len()))?;
    let mut first_only = AnnotationPolicy::default();
    first_only.annotate_every_occurrence = false;
    first_only.match_options.match_plural = true;
    let policies = [AnnotationPolicy::default(), first_only];
    let mut wrappers = 0;
    for (name, html) in &corpus {
        let tree = parse_html(html).map_err(|e| format!("{name}: {e}"))?;
        for policy in &policies {
            let once = annotate(&tree, &terms, policy);
            wrappers += once.total();
            ensure(once.tree.concat_text() == tree.concat_text(), format!("{name}: text changed"))?;
            ensure(
                strip_annotations(&once.tree).concat_text() == tree.concat_text(),
                format!("{name}: strip is not text-equal"),
            )?;
            let twice = annotate(&once.tree, &terms, policy);
            ensure(twice.total() == 0, format!("{name}: second pass added {}", twice.total()))?;
            ensure(twice.tree == once.tree, format!("{name}: second pass changed the tree"))?;
        }
    }
    Ok(format!("{} fixtures x 2 policies, {wrappers} wrappers, all round-trips exact", corpus.len()))
}

fn classifier_gate() -> Check {
    let llm = Arc::new(Counted::new(StubLlm::new(StubVerdict::Always(true))));
    let tax = StubTaxonomy::fixed(vec![CategoryLabel::new("/Computers & Electronics", 0.9).unwrap()]);
    let c = ClassifierChain::new(Arc::new(tax), llm.clone())
        .classify("Parliament debated the budget.")
        .map_err(|e| e.to_string())?;
    ensure(c.is_tech && c.decided_by == DecidedBy::Taxonomy, format!("got {c:?}"))?;
    ensure(llm.calls() == 0, format!("LLM called {} times", llm.calls()))?;

    let llm = Arc::new(Counted::new(StubLlm::new(StubVerdict::Always(true))));
    let tax = StubTaxonomy::fixed(vec![CategoryLabel::new("/Politics", 0.9).unwrap()]);
    let c = ClassifierChain::new(Arc::new(tax), llm.clone())
        .classify("A blockchain voting pilot in the national election.")
        .map_err(|e| e.to_string())?;
    ensure(c.is_tech && c.decided_by == DecidedBy::LlmFallback, format!("got {c:?}"))?;
    ensure(llm.calls() == 1, format!("LLM called {} times", llm.calls()))?;
    Ok("technology category: taxonomy, 0 LLM calls; /Politics + yes: llm_fallback".into())
}

fn cache_convergence() -> Check {
    let llm = Arc::new(Counted::new(
        StubLlm::new(StubVerdict::Always(true)).with_definition(
            "AHCI",
            "Advanced Host Controller Interface",
            "A register-level interface for SATA controllers.",
        ),
    ));
    let store = Arc::new(GlossaryStore::seeded());
    let mut p = Pipeline::new(store.clone());
    p.llm = Some(llm.clone());
    let doc = SourceDocument::new(
        "t",
        "<article><p>The computer boots from an SSD in AHCI mode; the software driver handles data.</p></article>",
    );
    let mut sources = Vec::new();
    for _ in 0..2 {
        let r = p.run(&doc).map_err(|e| e.to_string())?.resolution.ok_or("page not tech")?;
        let t = r.terms.iter().find(|t| t.key == "AHCI").ok_or("AHCI unresolved")?;
        sources.push(t.source);
    }
    ensure(sources == [TermSource::Llm, TermSource::Dictionary], format!("sources {sources:?}"))?;
    ensure(llm.calls() == 1, format!("{} LLM calls", llm.calls()))?;
    let origin = store.get_entry("AHCI").map_err(|e| e.to_string())?.origin;
    ensure(origin == Origin::AiCached, format!("origin {origin:?}"))?;
    Ok("sources [llm, dictionary], 1 LLM call, cached as ai_cached".into())
}

fn statistics_oracle() -> Check {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-4;
    let fixed: &[(&[f64], f64, f64, f64)] = &[
        (&[1.0, 2.0, 3.0, 4.0], 2.5, 2.5, 1.2910),
        (&[2135.0], 2135.0, 2135.0, 0.0),
        (&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0], 5.0, 4.5, 2.13809),
        (&[5.0, 1.0, 3.0], 3.0, 3.0, 2.0),
    ];
    for (xs, mean, median, sd) in fixed {
        let s = summarize(xs).map_err(|e| e.to_string())?;
        ensure(
            close(s.mean, *mean) && close(s.median, *median) && close(s.sd, *sd),
            format!("{xs:?} gave {s:?}"),
        )?;
    }
    ensure(summarize(&[]).is_err(), "empty input accepted")?;

    let mut rng = StdRng::seed_from_u64(0x57A7);
    for i in 0..10_000 {
        let n = rng.random_range(1..=40);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1e4..1e5)).collect();
        let s = summarize(&xs).map_err(|e| e.to_string())?;
        let (mean, median, sd, min, max) = oracle::stats(&xs);
        let tol = 1e-9 * (1.0 + max.abs().max(min.abs()));
        ensure(
            s.min <= s.median && s.median <= s.max && s.min <= s.mean && s.mean <= s.max,
            format!("sample {i}: order violated {s:?}"),
        )?;
        ensure(s.range == s.max - s.min && s.sd >= 0.0, format!("sample {i}: range/sd {s:?}"))?;
        ensure(
            (s.mean - mean).abs() <= tol
                && s.median == median
                && (s.sd - sd).abs() <= 1e-6 * (1.0 + sd)
                && s.min == min
                && s.max == max,
            format!("sample {i}: disagrees with the two-pass oracle"),
        )?;
    }
    Ok("4 fixed fixtures exact to 1e-4; invariants hold on 10,000 random samples".into())
}

fn simulated_benchmark() -> Check {
    let html = std::fs::read_to_string(common::fixture("tech_article.html")).map_err(|e| e.to_string())?;
    let plan = BenchPlan {
        runs: NonZeroUsize::new(10).unwrap(),
        latency: Some(Latencies {
            dictionary: Duration::from_millis(2135),
            llm: Duration::from_millis(16_429),
            taxonomy: Duration::ZERO,
        }),
        warm: false,
        include_manual: true,
    };
    let r = run_bench(&PipelineConfig::default(), &SourceDocument::new("tech_article.html", html), &plan)
        .map_err(|e| e.to_string())?;
    let (dict, llm) = (&r.comparison.rows[0], &r.comparison.rows[1]);
    let within = |got: f64, want: f64| (got - want).abs() <= 0.02 * want;
    ensure(dict.n == 10 && llm.n == 10, "wrong sample counts")?;
    ensure(within(dict.mean_ms, 2135.0), format!("dictionary mean {:.1}", dict.mean_ms))?;
    ensure(within(llm.mean_ms, 16_429.0), format!("LLM mean {:.1}", llm.mean_ms))?;
    let ratio = r.comparison.speedup.ok_or("no ratio")?;
    ensure((ratio - 7.7).abs() <= 0.2, format!("ratio {ratio:.3}"))?;
    Ok(format!(
        "dictionary {:.1} ms, LLM {:.1} ms, {ratio:.2}x over 10 runs",
        dict.mean_ms, llm.mean_ms
    ))
}

fn desk_latency() -> Check {
    let page = common::fixture("tech_article.html");
    let size = std::fs::metadata(&page).map_err(|e| e.to_string())?.len();
    let page = page.to_string_lossy().into_owned();
    let mut times = Vec::new();
    let mut summary = String::new();
    for _ in 0..10 {
        let cli = Cli::try_parse_from(["acro", "--offline", "annotate", &page]).map_err(|e| e.to_string())?;
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let started = Instant::now();
        acro_cli::run(
            cli,
            &mut Io {
                stdin: &mut std::io::empty(),
                stdout: &mut out,
                stderr: &mut err,
            },
        )
        .map_err(|e| e.to_string())?;
        times.push(started.elapsed().as_secs_f64() * 1000.0);
        summary = String::from_utf8_lossy(&err).into_owned();
    }
    let dictionary_keys = summary.lines().filter(|l| l.contains("\tdictionary\t")).count();
    ensure(dictionary_keys >= 15, format!("only {dictionary_keys} dictionary acronyms"))?;
    let mean = summarize(&times).map_err(|e| e.to_string())?.mean;
    ensure(mean < 250.0, format!("mean {mean:.1} ms"))?;
    Ok(format!(
        "{size}-byte page, {dictionary_keys} dictionary acronyms, mean {mean:.1} ms over 10 runs"
    ))
}

async fn body_of(app: &axum::Router, method: &str, uri: &str, json: Option<&str>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if json.is_some() {
        req = req.header("content-type", "application/json");
    }
    let body = json.map(|j| Body::from(j.to_string())).unwrap_or_default();
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

fn glossary_api() -> Check {
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("glossary.jsonl");
    let store = GlossaryStore::open_or_seed(&path).map_err(|e| e.to_string())?;
    let definitions: Vec<String> = store.entries().into_iter().map(|e| e.definition).collect();
    let app = router(common::state(store, &PipelineConfig::default()));

    rt.block_on(async {
        let (status, bytes) = body_of(&app, "GET", "/terms", None).await;
        ensure(status == StatusCode::OK, format!("/terms {status}"))?;
        let text = String::from_utf8_lossy(&bytes);
        ensure(
            definitions.iter().all(|d| !text.contains(d.as_str())),
            "/terms leaks definition text",
        )?;

        let (_, first) = body_of(&app, "GET", "/search?q=s&limit=50", None).await;
        for _ in 0..5 {
            let (_, again) = body_of(&app, "GET", "/search?q=s&limit=50", None).await;
            ensure(again == first, "search ranking changed between calls")?;
        }

        let (status, bytes) = body_of(&app, "POST", "/cache", Some(r#"{"key":"CPU","expansion":"x","definition":"y"}"#)).await;
        let err: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        ensure(
            status == StatusCode::CONFLICT && err["error"] == "conflict_curated",
            format!("curated overwrite gave {status} {err}"),
        )?;
        let (status, _) =
            body_of(&app, "POST", "/cache", Some(r#"{"key":"AHCI","expansion":"x","definition":"y"}"#)).await;
        ensure(status == StatusCode::CREATED, format!("cache write gave {status}"))?;
        let (status, _) = body_of(
            &app,
            "POST",
            "/contributions",
            Some(r#"{"key":"K8S","expansion":"Kubernetes","definition":"d"}"#),
        )
        .await;
        ensure(status == StatusCode::ACCEPTED, format!("contribution gave {status}"))
    })?;

    // Search order must not depend on insertion order.
    let mut entries = GlossaryStore::seeded().entries();
    let forward = GlossaryStore::from_entries(entries.clone()).map_err(|e| e.to_string())?;
    entries.reverse();
    let reversed = GlossaryStore::from_entries(entries).map_err(|e| e.to_string())?;
    let limit = NonZeroUsize::new(50).unwrap();
    ensure(forward.search("p", limit) == reversed.search("p", limit), "ranking depends on insertion order")?;

    let live = rt.block_on(async {
        let (_, bytes) = body_of(&app, "GET", "/terms/AHCI", None).await;
        serde_json::from_slice::<GlossaryEntry>(&bytes).map_err(|e| e.to_string())
    })?;
    let reloaded = GlossaryStore::load(&path).map_err(|e| e.to_string())?;
    ensure(reloaded.get_entry("AHCI").ok() == Some(live), "cached entry not persisted")?;
    ensure(reloaded.pending().len() == 1, "contribution not persisted")?;
    let again = GlossaryStore::load(&path).map_err(|e| e.to_string())?;
    reloaded.save().map_err(|e| e.to_string())?;
    ensure(GlossaryStore::load(&path).map_err(|e| e.to_string())? == again, "save/load changed the store")?;
    Ok("/terms has no definitions, search deterministic, persistence round-trips, curated conflict is 409".into())
}

fn main() {
    let checks: [Criterion; 8] = [
        ("matcher oracle equivalence", matcher_oracle),
        ("annotation round-trip", annotation_round_trip),
        ("classifier gate", classifier_gate),
        ("cache convergence", cache_convergence),
        ("statistics oracle", statistics_oracle),
        ("simulated latency comparison", simulated_benchmark),
        ("desk-scale latency", desk_latency),
        ("glossary API conformance", glossary_api),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
