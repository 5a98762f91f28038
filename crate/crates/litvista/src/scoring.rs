//! Anchor and dependency scoring.
//!
//! Predictions are scored as sets: precision over predicted rows, recall
//! over gold event anchors, with one-to-one maximum matching between the
//! two sides. Dependency edges are directed `(child span, head span)`
//! pairs resolved through the prediction table's own head ids; a head id
//! missing from the table is a false positive, never a crash. The headline
//! aggregate is the harmonic mean of the anchor and dependency F1s.
//!
//! Duplicate predicted rows (same span and role) keep their first
//! occurrence; the duplicates count as false positives. Matching is exact
//! on spans by default; `word_window(k)` relaxes it to equal words whose
//! span starts differ by at most `k` characters, a diagnostic mode only.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::format::PredictionRow;
use crate::topology::{NarrativeGraph, Role, Span};

/// How predicted spans are matched against gold spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanMatch {
    Exact,
    /// Equal words whose span starts differ by at most `k` characters.
    WordWindow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Pool tp/fp/fn across documents, then compute P/R/F1.
    Micro,
    /// Average per-document P/R/F1.
    Macro,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub span_match: SpanMatch,
    pub role_required_for_anchor: bool,
    pub dep_labeled: bool,
    pub include_root_edges: bool,
    /// Whether Impulse→Impulse backbone links count as scored edges.
    pub include_backbone_edges: bool,
    pub aggregation: Aggregation,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            span_match: SpanMatch::Exact,
            role_required_for_anchor: true,
            dep_labeled: false,
            include_root_edges: true,
            include_backbone_edges: true,
            aggregation: Aggregation::Micro,
        }
    }
}

/// A precision/recall/F1 triple with its underlying counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl Prf {
    pub fn from_counts(true_pos: u64, false_pos: u64, false_neg: u64) -> Prf {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(true_pos, true_pos + false_pos);
        let recall = ratio(true_pos, true_pos + false_neg);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
            true_pos,
            false_pos,
            false_neg,
        }
    }

    pub fn zero() -> Prf {
        Prf::from_counts(0, 0, 0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("harmonic mean inputs must lie in [0, 1], got ({0}, {1})")]
    DomainError(f64, f64),
}

/// `2ad/(a+d)`, the aggregate that orders the result table; 0 at (0, 0).
pub fn harmonic_mean(a_f1: f64, d_f1: f64) -> Result<f64, ScoreError> {
    let in_unit = |x: f64| (0.0..=1.0).contains(&x);
    if !in_unit(a_f1) || !in_unit(d_f1) {
        return Err(ScoreError::DomainError(a_f1, d_f1));
    }
    if a_f1 + d_f1 == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * a_f1 * d_f1 / (a_f1 + d_f1))
}

/// Per-document scores inside an [`EvalResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DocScores {
    pub anchor: Prf,
    pub dependency: Prf,
}

/// Run-level scores: anchors, dependencies, and their harmonic mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub anchor: Prf,
    pub dependency: Prf,
    pub harmonic: f64,
    pub per_doc: BTreeMap<String, DocScores>,
}

fn spans_compatible(
    cfg: &MatchConfig,
    pred_span: Span,
    pred_word: &str,
    gold_span: Span,
    gold_word: &str,
) -> bool {
    match cfg.span_match {
        SpanMatch::Exact => pred_span == gold_span,
        SpanMatch::WordWindow(k) => {
            pred_word == gold_word && pred_span.start.abs_diff(gold_span.start) <= k
        }
    }
}

/// Keeps the first row per (span, role); returns survivors and the
/// duplicate count.
fn dedup_rows(pred: &[PredictionRow]) -> (Vec<&PredictionRow>, u64) {
    let mut seen: HashMap<(Span, Role), ()> = HashMap::new();
    let mut kept = Vec::with_capacity(pred.len());
    let mut duplicates = 0u64;
    for row in pred {
        if seen.insert((row.span, row.category), ()).is_none() {
            kept.push(row);
        } else {
            duplicates += 1;
        }
    }
    (kept, duplicates)
}

/// Kuhn's augmenting-path maximum bipartite matching.
fn maximum_matching(adj: &[Vec<usize>], n_right: usize) -> u64 {
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                let free = match match_right[v] {
                    None => true,
                    Some(w) => augment(w, adj, seen, match_right),
                };
                if free {
                    match_right[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }

    let mut match_right = vec![None; n_right];
    let mut matched = 0u64;
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        if augment(u, adj, &mut seen, &mut match_right) {
            matched += 1;
        }
    }
    matched
}

/// Scores predicted rows against gold event anchors.
pub fn anchor_prf(pred: &[PredictionRow], gold: &NarrativeGraph, cfg: &MatchConfig) -> Prf {
    let (rows, duplicates) = dedup_rows(pred);
    let gold_anchors: Vec<_> = gold.anchors().iter().filter(|a| a.role.is_event()).collect();
    let adj: Vec<Vec<usize>> = rows
        .iter()
        .map(|row| {
            gold_anchors
                .iter()
                .enumerate()
                .filter(|(_, g)| {
                    spans_compatible(cfg, row.span, &row.word, g.span, &g.word)
                        && (!cfg.role_required_for_anchor || row.category == g.role)
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let tp = maximum_matching(&adj, gold_anchors.len());
    let fp = rows.len() as u64 - tp + duplicates;
    let fn_count = gold_anchors.len() as u64 - tp;
    Prf::from_counts(tp, fp, fn_count)
}

/// A directed edge; `head: None` is the virtual root.
struct Edge<'a> {
    child_span: Span,
    child_word: &'a str,
    child_role: Role,
    head: Option<(Span, &'a str, Role)>,
}

fn edge_compatible(cfg: &MatchConfig, pred: &Edge<'_>, gold: &Edge<'_>) -> bool {
    if !spans_compatible(
        cfg,
        pred.child_span,
        pred.child_word,
        gold.child_span,
        gold.child_word,
    ) {
        return false;
    }
    let heads_ok = match (&pred.head, &gold.head) {
        (None, None) => true,
        (Some((ps, pw, _)), Some((gs, gw, _))) => spans_compatible(cfg, *ps, pw, *gs, gw),
        _ => false,
    };
    if !heads_ok {
        return false;
    }
    if cfg.dep_labeled {
        if pred.child_role != gold.child_role {
            return false;
        }
        if let (Some((_, _, pr)), Some((_, _, gr))) = (&pred.head, &gold.head) {
            if pr != gr {
                return false;
            }
        }
    }
    true
}

/// Scores predicted dependency edges against gold edges.
pub fn dependency_prf(pred: &[PredictionRow], gold: &NarrativeGraph, cfg: &MatchConfig) -> Prf {
    let (rows, duplicates) = dedup_rows(pred);
    // Head ids resolve against the whole table, first occurrence per id.
    let mut by_id: HashMap<u32, &PredictionRow> = HashMap::new();
    for row in pred {
        by_id.entry(row.id).or_insert(row);
    }

    let mut pred_edges: Vec<Edge<'_>> = Vec::new();
    let mut dangling = 0u64;
    for row in rows {
        if row.head < 0 {
            if cfg.include_root_edges {
                pred_edges.push(Edge {
                    child_span: row.span,
                    child_word: &row.word,
                    child_role: row.category,
                    head: None,
                });
            }
            continue;
        }
        let head_row = u32::try_from(row.head).ok().and_then(|id| by_id.get(&id));
        match head_row {
            Some(h) => pred_edges.push(Edge {
                child_span: row.span,
                child_word: &row.word,
                child_role: row.category,
                head: Some((h.span, &h.word, h.category)),
            }),
            None => {
                log::warn!(
                    "row {} names head {} which is not in the prediction table",
                    row.id,
                    row.head
                );
                dangling += 1;
            }
        }
    }

    let mut gold_edges: Vec<Edge<'_>> = Vec::new();
    for a in gold.anchors().iter().filter(|a| a.role.is_event()) {
        match a.head {
            Some(h) => {
                if let Some(head) = gold.anchor(h) {
                    gold_edges.push(Edge {
                        child_span: a.span,
                        child_word: &a.word,
                        child_role: a.role,
                        head: Some((head.span, &head.word, head.role)),
                    });
                }
            }
            None => {
                if cfg.include_root_edges {
                    gold_edges.push(Edge {
                        child_span: a.span,
                        child_word: &a.word,
                        child_role: a.role,
                        head: None,
                    });
                }
            }
        }
    }

    if !cfg.include_backbone_edges {
        let is_backbone = |e: &Edge<'_>| {
            e.child_role == Role::Impulse
                && e.head.is_some_and(|(_, _, role)| role == Role::Impulse)
        };
        pred_edges.retain(|e| !is_backbone(e));
        gold_edges.retain(|e| !is_backbone(e));
    }

    let adj: Vec<Vec<usize>> = pred_edges
        .iter()
        .map(|p| {
            gold_edges
                .iter()
                .enumerate()
                .filter(|(_, g)| edge_compatible(cfg, p, g))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let tp = maximum_matching(&adj, gold_edges.len());
    let fp = pred_edges.len() as u64 - tp + dangling + duplicates;
    let fn_count = gold_edges.len() as u64 - tp;
    Prf::from_counts(tp, fp, fn_count)
}

/// Scores a whole run; gold documents missing from `predictions` are
/// scored as empty with a warning.
pub fn score_run(
    predictions: &BTreeMap<String, Vec<PredictionRow>>,
    gold: &[NarrativeGraph],
    cfg: &MatchConfig,
) -> EvalResult {
    let mut per_doc = BTreeMap::new();
    for g in gold {
        let empty = Vec::new();
        let rows = match predictions.get(g.doc_id()) {
            Some(rows) => rows,
            None => {
                log::warn!("no predictions for document '{}', scoring as empty", g.doc_id());
                &empty
            }
        };
        per_doc.insert(
            g.doc_id().to_owned(),
            DocScores {
                anchor: anchor_prf(rows, g, cfg),
                dependency: dependency_prf(rows, g, cfg),
            },
        );
    }
    for doc_id in predictions.keys() {
        if !gold.iter().any(|g| g.doc_id() == doc_id) {
            log::warn!("predictions for unknown document '{doc_id}' ignored");
        }
    }

    let anchor = aggregate(per_doc.values().map(|d| &d.anchor), cfg.aggregation);
    let dependency = aggregate(per_doc.values().map(|d| &d.dependency), cfg.aggregation);
    let harmonic = harmonic_mean(anchor.f1, dependency.f1).expect("f1 values lie in [0, 1]");
    EvalResult {
        anchor,
        dependency,
        harmonic,
        per_doc,
    }
}

/// Micro pools counts; macro averages per-document rates. Counts stay
/// pooled sums under both, so they remain meaningful diagnostics.
fn aggregate<'a>(docs: impl Iterator<Item = &'a Prf>, how: Aggregation) -> Prf {
    let docs: Vec<&Prf> = docs.collect();
    let (mut tp, mut fp, mut fn_count) = (0u64, 0u64, 0u64);
    for d in &docs {
        tp += d.true_pos;
        fp += d.false_pos;
        fn_count += d.false_neg;
    }
    match how {
        Aggregation::Micro => Prf::from_counts(tp, fp, fn_count),
        Aggregation::Macro => {
            let n = docs.len() as f64;
            if docs.is_empty() {
                return Prf::zero();
            }
            let mean = |f: &dyn Fn(&Prf) -> f64| docs.iter().map(|d| f(d)).sum::<f64>() / n;
            Prf {
                precision: mean(&|d| d.precision),
                recall: mean(&|d| d.recall),
                f1: mean(&|d| d.f1),
                true_pos: tp,
                false_pos: fp,
                false_neg: fn_count,
            }
        }
    }
}

/// One CSV row per model, mirroring the result table's layout.
pub fn results_csv(entries: &[(&str, &EvalResult)]) -> String {
    let mut out = String::from("model,anchor_p,anchor_r,anchor_f1,dep_p,dep_r,dep_f1,harmonic\n");
    for (model, r) in entries {
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            model,
            r.anchor.precision,
            r.anchor.recall,
            r.anchor.f1,
            r.dependency.precision,
            r.dependency.recall,
            r.dependency.f1,
            r.harmonic
        ));
    }
    out
}
