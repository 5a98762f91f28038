//! Graph JSON files and dataset directories.
//!
//! A graph file is a single JSON object: `doc_id`, `text`, and an `anchors`
//! array of `{id, start, end, word, role, head}` rows, `head: -1` marking a
//! root. Offsets are character offsets into `text`. A dataset directory
//! holds `train/`, `val/`, and `test/` subdirectories of graph files; gold
//! graphs must pass relaxed validation to load.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::topology::{validate, Anchor, GraphError, Mode, NarrativeGraph, Role, Span};

use super::table::PredictionRow;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("anchor {id}: unknown role '{role}'")]
    BadRole { id: u32, role: String },
    #[error("anchor {id}: head {head} is not an anchor id or -1")]
    BadHead { id: u32, head: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("dataset split '{split}' missing at {path}")]
    MissingSplit { split: &'static str, path: PathBuf },
    #[error("gold graph '{doc_id}' failed relaxed validation ({violations} violation(s), first: {first})")]
    InvalidGoldGraph {
        doc_id: String,
        violations: usize,
        first: String,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct RawGraph {
    doc_id: String,
    text: String,
    anchors: Vec<RawAnchor>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawAnchor {
    id: u32,
    start: usize,
    end: usize,
    word: String,
    role: String,
    head: i64,
}

/// Parses one graph from JSON text.
pub fn graph_from_json(json: &str) -> Result<NarrativeGraph, DatasetError> {
    let raw: RawGraph = serde_json::from_str(json)?;
    let mut anchors = Vec::with_capacity(raw.anchors.len());
    for a in raw.anchors {
        let role = Role::parse_ci(&a.role).ok_or(DatasetError::BadRole {
            id: a.id,
            role: a.role.clone(),
        })?;
        let head = match a.head {
            -1 => None,
            h if h >= 0 => Some(h as u32),
            h => return Err(DatasetError::BadHead { id: a.id, head: h }),
        };
        anchors.push(Anchor {
            id: a.id,
            span: Span::new(a.start, a.end)?,
            word: a.word,
            role,
            head,
        });
    }
    Ok(NarrativeGraph::new(raw.doc_id, raw.text, anchors)?)
}

/// Serializes a graph to pretty JSON with a trailing newline.
pub fn graph_to_json(graph: &NarrativeGraph) -> String {
    let raw = RawGraph {
        doc_id: graph.doc_id().to_owned(),
        text: graph.text().to_owned(),
        anchors: graph
            .anchors()
            .iter()
            .map(|a| RawAnchor {
                id: a.id,
                start: a.span.start,
                end: a.span.end,
                word: a.word.clone(),
                role: a.role.name().to_owned(),
                head: a.head.map_or(-1, i64::from),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("graph serialization");
    out.push('\n');
    out
}

pub fn load_graph(path: &Path) -> Result<NarrativeGraph, DatasetError> {
    let json = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })?;
    graph_from_json(&json)
}

pub fn save_graph(path: &Path, graph: &NarrativeGraph) -> Result<(), DatasetError> {
    fs::write(path, graph_to_json(graph)).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })
}

/// The three gold splits of a dataset directory.
#[derive(Debug)]
pub struct DatasetSplits {
    pub train: Vec<NarrativeGraph>,
    pub val: Vec<NarrativeGraph>,
    pub test: Vec<NarrativeGraph>,
}

impl DatasetSplits {
    pub fn all(&self) -> impl Iterator<Item = &NarrativeGraph> {
        self.train.iter().chain(&self.val).chain(&self.test)
    }
}

/// Loads `root/{train,val,test}/*.json`, each split in filename order.
///
/// Every graph is a gold graph here and must be relaxed-valid.
pub fn load_dataset(root: &Path) -> Result<DatasetSplits, DatasetError> {
    let mut splits = DatasetSplits {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (split, bucket) in [
        ("train", &mut splits.train),
        ("val", &mut splits.val),
        ("test", &mut splits.test),
    ] {
        let dir = root.join(split);
        if !dir.is_dir() {
            return Err(DatasetError::MissingSplit { split, path: dir });
        }
        let mut files: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|source| DatasetError::Io {
                path: dir.clone(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        for file in files {
            let graph = load_graph(&file)?;
            let report = validate(&graph, Mode::Relaxed);
            if !report.is_valid() {
                return Err(DatasetError::InvalidGoldGraph {
                    doc_id: graph.doc_id().to_owned(),
                    violations: report.violations.len(),
                    first: report
                        .violations
                        .first()
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                });
            }
            bucket.push(graph);
        }
    }
    Ok(splits)
}

/// A word that does not match the text under its span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanMismatch {
    pub id: u32,
    pub span: Span,
    pub expected: String,
    /// `None` when the span falls outside the text.
    pub found: Option<String>,
}

impl std::fmt::Display for SpanMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.found {
            Some(found) => write!(
                f,
                "anchor {}: span {} reads '{}', expected '{}'",
                self.id, self.span, found, self.expected
            ),
            None => write!(
                f,
                "anchor {}: span {} is outside the text (expected '{}')",
                self.id, self.span, self.expected
            ),
        }
    }
}

/// Case-insensitive match ignoring punctuation stuck to either end.
fn spans_match(expected: &str, found: &str) -> bool {
    let norm = |s: &str| {
        s.trim_matches(|c: char| !c.is_alphanumeric())
            .to_lowercase()
    };
    norm(expected) == norm(found)
}

/// Checks every anchor word against the text under its span.
pub fn verify_graph_spans(graph: &NarrativeGraph) -> Vec<SpanMismatch> {
    let mut mismatches = Vec::new();
    for a in graph.anchors() {
        let found = graph.slice(a.span);
        if !found.is_some_and(|s| spans_match(&a.word, s)) {
            mismatches.push(SpanMismatch {
                id: a.id,
                span: a.span,
                expected: a.word.clone(),
                found: found.map(str::to_owned),
            });
        }
    }
    mismatches
}

/// Checks prediction rows against a reference text.
pub fn verify_row_spans(text: &str, rows: &[PredictionRow]) -> Vec<SpanMismatch> {
    let char_starts: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
    let mut mismatches = Vec::new();
    for row in rows {
        let found = crate::topology::slice_chars(text, &char_starts, row.span);
        if !found.is_some_and(|s| spans_match(&row.word, s)) {
            mismatches.push(SpanMismatch {
                id: row.id,
                span: row.span,
                expected: row.word.clone(),
                found: found.map(str::to_owned),
            });
        }
    }
    mismatches
}
