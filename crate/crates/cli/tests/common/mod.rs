#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::io::Write;
use std::sync::Arc;

use acro_cli::server::{router, AppState};
use acro_cli::setup::{self, Providers};
use acro_core::config::PipelineConfig;
use acro_core::glossary::GlossaryStore;
use axum::Router;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    root().join("fixtures/corpus").join(name)
}

pub fn config(name: &str) -> PathBuf {
    root().join("fixtures/config").join(name)
}

/// Every bundled HTML page, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(root().join("fixtures/corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "html"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Run {
    pub fn out(&self) -> String {
        String::from_utf8_lossy(&self.stdout).into_owned()
    }
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Run {
            code: o.status.code().unwrap_or(-1),
            stdout: o.stdout,
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        }
    }
}

fn command(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_acro"));
    c.args(args)
        .env_remove("TAXONOMY_API_KEY")
        .env_remove("LLM_API_KEY")
        .env_remove("ACRO_LOG");
    c
}

pub fn acro(args: &[&str]) -> Run {
    command(args).stdin(Stdio::null()).output().unwrap().into()
}

pub fn acro_stdin(args: &[&str], input: &[u8]) -> Run {
    let mut child = command(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap().into()
}

pub fn state(store: GlossaryStore, cfg: &PipelineConfig) -> AppState {
    let providers = Providers::build(cfg).unwrap();
    let pipeline = setup::pipeline(cfg, Arc::new(GlossaryStore::empty()), &providers).unwrap();
    AppState {
        store: Arc::new(store),
        pipeline: Arc::new(pipeline),
    }
}

/// Serves `app` on an ephemeral port from a background thread for the rest
/// of the test process.
pub fn spawn(app: Router) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    rx.recv().unwrap()
}

pub fn spawn_glossary(store: GlossaryStore) -> SocketAddr {
    spawn(router(state(store, &PipelineConfig::default())))
}
