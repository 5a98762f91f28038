//! Evaluation runs: prompts, execution, caching, and orchestration.
//!
//! A run takes a gold split and a model config, builds one prompt per
//! document, executes it through the configured backend, parses whatever
//! comes back with the tolerant reader, and scores the result. Per-doc
//! failures are recorded in the manifest and scored as empty predictions;
//! the run itself always completes. Re-running against an intact cache
//! issues zero backend calls and reproduces the same result.
//!
//! Endpoints select the backend: `http(s)://` for live APIs, `replay:DIR`
//! for canned responses, and `baseline:` for the local heuristic, which
//! needs no network at all.

pub mod backend;
pub mod cache;
pub mod prompts;

mod baseline;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backend::{ExecError, Executor, Fetched};
pub use baseline::heuristic_baseline;
pub use cache::{cache_key, ResponseCache};
pub use prompts::{build_e2e_prompt, build_oracle_prompt, PromptError, E2E_TEMPLATE, ORACLE_TEMPLATE};

use crate::format::{
    parse_model_output_tolerant, serialize_prediction_table, CandidateList, PredictionRow,
};
use crate::scoring::{results_csv, score_run, EvalResult, MatchConfig};
use crate::topology::NarrativeGraph;

/// Endpoint spelling that selects the local heuristic backend.
const BASELINE_ENDPOINT: &str = "baseline:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub endpoint: String,
    /// Name of the environment variable holding the API key, if any.
    pub api_key_env: Option<String>,
    pub temperature: f64,
    pub max_output_tokens: Option<u32>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub parallelism: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            name: String::new(),
            endpoint: String::new(),
            api_key_env: None,
            temperature: 0.0,
            max_output_tokens: None,
            timeout_secs: 120,
            max_retries: 2,
            parallelism: 1,
        }
    }
}

impl ModelConfig {
    pub fn from_toml(text: &str) -> Result<ModelConfig, RunnerError> {
        let cfg: ModelConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ModelConfig, RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunnerError::Io {
            path: path.to_owned(),
            source,
        })?;
        ModelConfig::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let fail = |reason: &str| {
            Err(RunnerError::Config {
                reason: reason.to_owned(),
            })
        };
        if self.name.is_empty() {
            return fail("model name must not be empty");
        }
        if self.endpoint.is_empty() {
            return fail("endpoint must not be empty");
        }
        if !(self.temperature >= 0.0) {
            return fail("temperature must be a number >= 0");
        }
        if self.parallelism < 1 {
            return fail("parallelism must be >= 1");
        }
        Ok(())
    }

    fn is_baseline(&self) -> bool {
        self.endpoint.trim() == BASELINE_ENDPOINT
            || self.endpoint.trim() == BASELINE_ENDPOINT.trim_end_matches(':')
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    /// Classify pre-identified anchors.
    Oracle,
    /// Identify and classify in one pass.
    EndToEnd,
}

impl std::fmt::Display for RunMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunMode::Oracle => "oracle",
            RunMode::EndToEnd => "end_to_end",
        })
    }
}

/// What happened to one document during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DocStatus {
    /// Served from the cache without touching the backend.
    Cached { cache_key: String },
    /// Produced by the backend this run. Locally computed baseline
    /// responses carry an empty key.
    Fetched { cache_key: String },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub mode: RunMode,
    pub split: String,
    pub model: ModelConfig,
    /// Exactly one entry per gold document.
    pub docs: BTreeMap<String, DocStatus>,
    pub started_at: String,
    pub finished_at: String,
}

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("model config: {reason}")]
    Config { reason: String },
    #[error("could not parse model config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub split: String,
    pub mode: RunMode,
    pub cache_dir: PathBuf,
    /// When set, predictions, manifest, and results are persisted here.
    pub out_dir: Option<PathBuf>,
    pub run_id: Option<String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub predictions: BTreeMap<String, Vec<PredictionRow>>,
    pub result: EvalResult,
}

/// Evaluates one model over a gold split.
pub fn run_evaluation(
    gold: &[NarrativeGraph],
    model: &ModelConfig,
    match_cfg: &MatchConfig,
    opts: &RunOptions,
) -> Result<RunOutcome, RunnerError> {
    model.validate()?;
    let started_at = now_rfc3339();
    let executor = if model.is_baseline() {
        None
    } else {
        Some(Executor::new(model, &opts.cache_dir)?)
    };

    let slots: Mutex<Vec<Option<(DocStatus, Vec<PredictionRow>)>>> =
        Mutex::new(vec![None; gold.len()]);
    let next: AtomicUsize = AtomicUsize::new(0);
    let workers = model.parallelism.min(gold.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                let Some(doc) = gold.get(idx) else { break };
                let outcome = process_doc(doc, opts.mode, executor.as_ref());
                slots.lock().expect("worker panicked").as_mut_slice()[idx] = Some(outcome);
            });
        }
    });

    let mut docs = BTreeMap::new();
    let mut predictions = BTreeMap::new();
    for (doc, slot) in gold.iter().zip(slots.into_inner().expect("worker panicked")) {
        let (status, rows) = slot.expect("every document processed");
        docs.insert(doc.doc_id().to_owned(), status);
        predictions.insert(doc.doc_id().to_owned(), rows);
    }

    let result = score_run(&predictions, gold, match_cfg);
    let manifest = RunManifest {
        run_id: opts.run_id.clone().unwrap_or_else(|| {
            format!(
                "{}-{}-{}",
                opts.split,
                opts.mode,
                chrono::Utc::now().format("%Y%m%d%H%M%S")
            )
        }),
        mode: opts.mode,
        split: opts.split.clone(),
        model: model.clone(),
        docs,
        started_at,
        finished_at: now_rfc3339(),
    };
    if let Some(out_dir) = &opts.out_dir {
        persist(out_dir, &manifest, &predictions, &result)?;
    }
    Ok(RunOutcome {
        manifest,
        predictions,
        result,
    })
}

fn process_doc(
    doc: &NarrativeGraph,
    mode: RunMode,
    executor: Option<&Executor>,
) -> (DocStatus, Vec<PredictionRow>) {
    let candidates = CandidateList::from_graph(doc);
    let Some(executor) = executor else {
        let rows = match mode {
            RunMode::Oracle => heuristic_baseline(doc.text(), Some(&candidates), None),
            RunMode::EndToEnd => heuristic_baseline(doc.text(), None, None),
        };
        return (
            DocStatus::Fetched {
                cache_key: String::new(),
            },
            rows,
        );
    };

    let prompt = match mode {
        RunMode::Oracle => build_oracle_prompt(doc.text(), &candidates),
        RunMode::EndToEnd => build_e2e_prompt(doc.text()),
    };
    let prompt = match prompt {
        Ok(p) => p,
        Err(e) => {
            log::warn!("document '{}': {e}", doc.doc_id());
            return (DocStatus::Failed { error: e.to_string() }, Vec::new());
        }
    };
    match executor.execute(doc.doc_id(), &prompt) {
        Ok(fetched) => {
            let (rows, diag) = parse_model_output_tolerant(&fetched.text);
            if diag.fatal {
                log::warn!(
                    "document '{}': no table rows recovered from the response",
                    doc.doc_id()
                );
            }
            let status = if fetched.cached {
                DocStatus::Cached {
                    cache_key: fetched.cache_key,
                }
            } else {
                DocStatus::Fetched {
                    cache_key: fetched.cache_key,
                }
            };
            (status, rows)
        }
        Err(e) => {
            log::warn!("document '{}': {e}", doc.doc_id());
            (DocStatus::Failed { error: e.to_string() }, Vec::new())
        }
    }
}

fn persist(
    out_dir: &Path,
    manifest: &RunManifest,
    predictions: &BTreeMap<String, Vec<PredictionRow>>,
    result: &EvalResult,
) -> Result<(), RunnerError> {
    fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
        |source| RunnerError::Io {
            path: path.to_owned(),
            source,
        }
    }
    let pred_dir = out_dir.join("predictions");
    std::fs::create_dir_all(&pred_dir).map_err(io_err(&pred_dir))?;
    for (doc_id, rows) in predictions {
        let path = pred_dir.join(format!("{}.tsv", sanitize(doc_id)));
        std::fs::write(&path, serialize_prediction_table(rows)).map_err(io_err(&path))?;
    }
    let manifest_path = out_dir.join("manifest.json");
    let manifest_json =
        serde_json::to_string_pretty(manifest).expect("manifest serialization");
    std::fs::write(&manifest_path, manifest_json + "\n").map_err(io_err(&manifest_path))?;
    let results_path = out_dir.join("results.json");
    let results_json = serde_json::to_string_pretty(result).expect("result serialization");
    std::fs::write(&results_path, results_json + "\n").map_err(io_err(&results_path))?;
    let csv_path = out_dir.join("results.csv");
    std::fs::write(&csv_path, results_csv(&[(&manifest.model.name, result)]))
        .map_err(io_err(&csv_path))?;
    Ok(())
}

fn sanitize(doc_id: &str) -> String {
    doc_id
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
