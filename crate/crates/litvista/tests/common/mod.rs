#![allow(dead_code)]

//! Shared generators and reference oracles for the integration suites.
//!
//! Everything here is deliberately independent of the library internals:
//! oracles recompute results from the definitions with the dumbest possible
//! algorithm so the optimized implementations have something to disagree
//! with.

use std::collections::HashMap;

use rand::prelude::*;
use rand::rngs::StdRng;

use litvista::format::PredictionRow;
use litvista::scoring::{MatchConfig, SpanMatch};
use litvista::topology::{Anchor, NarrativeGraph, Role, Span};

const VOCAB: &[&str] = &[
    "ran", "saw", "felt", "thought", "paused", "looked", "fled", "wept", "spoke", "heard",
    "waited", "über", "café", "turned",
];

fn role_ok(child: Role, head: Role, relaxed_chains: bool) -> bool {
    match child {
        Role::Impulse => head == Role::Impulse,
        Role::Resonance => {
            head == Role::Impulse || (relaxed_chains && head == Role::Resonance)
        }
        Role::Pause => {
            head == Role::Impulse
                || head == Role::Resonance
                || (relaxed_chains && head == Role::Pause)
        }
        Role::NonEvent => false,
    }
}

/// A random graph that is valid by construction: strict-valid when
/// `relaxed_chains` is false, relaxed-valid otherwise. Heads follow a random
/// acyclicity rank, so edges point both forward and backward in the text.
pub fn random_graph(rng: &mut StdRng, max_anchors: usize, relaxed_chains: bool) -> NarrativeGraph {
    let n = rng.gen_range(1..=max_anchors.max(1));

    let mut roles = Vec::with_capacity(n);
    for _ in 0..n {
        let draw: f64 = rng.gen();
        roles.push(if draw < 0.35 {
            Role::Impulse
        } else if draw < 0.70 {
            Role::Resonance
        } else if draw < 0.90 {
            Role::Pause
        } else {
            Role::NonEvent
        });
    }

    let mut text = String::new();
    let mut spans = Vec::with_capacity(n);
    let mut words = Vec::with_capacity(n);
    for _ in 0..n {
        let word = VOCAB[rng.gen_range(0..VOCAB.len())];
        let start = text.chars().count();
        text.push_str(word);
        spans.push(Span {
            start,
            end: start + word.chars().count(),
        });
        words.push(word.to_string());
        text.push(' ');
        if rng.gen_bool(0.2) {
            text.push(' ');
        }
    }

    // Random acyclicity rank; heads may only point to lower ranks.
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);

    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(rng);

    let mut heads: Vec<Option<u32>> = vec![None; n];
    for i in 0..n {
        if roles[i] == Role::NonEvent || rng.gen_bool(0.15) {
            continue;
        }
        let candidates: Vec<usize> = (0..n)
            .filter(|&j| rank[j] < rank[i] && role_ok(roles[i], roles[j], relaxed_chains))
            .collect();
        if let Some(&j) = candidates.choose(rng) {
            heads[i] = Some(ids[j]);
        }
    }

    let anchors = (0..n)
        .map(|i| Anchor {
            id: ids[i],
            span: spans[i],
            word: words[i].clone(),
            role: roles[i],
            head: heads[i],
        })
        .collect();
    NarrativeGraph::new("gen", text, anchors).expect("generated ids are unique")
}

/// Random head/role corruption producing a mix of valid and invalid graphs.
pub fn corrupt_graph(rng: &mut StdRng, graph: &NarrativeGraph) -> NarrativeGraph {
    let mut anchors: Vec<Anchor> = graph.anchors().to_vec();
    let n = anchors.len();
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..n);
        match rng.gen_range(0..4) {
            0 => anchors[i].head = Some(anchors[i].id),
            1 => anchors[i].head = Some(900 + rng.gen_range(0..10)),
            2 => anchors[i].head = Some(anchors[rng.gen_range(0..n)].id),
            _ => {
                anchors[i].role = *[Role::Impulse, Role::Resonance, Role::Pause, Role::NonEvent]
                    .choose(rng)
                    .unwrap()
            }
        }
    }
    NarrativeGraph::new(graph.doc_id(), graph.text(), anchors).expect("ids untouched")
}

/// Predictions derived from gold by dropping, jittering, relabeling,
/// duplicating, and inventing rows.
pub fn mutate_predictions(rng: &mut StdRng, gold: &NarrativeGraph) -> Vec<PredictionRow> {
    let mut rows: Vec<PredictionRow> = Vec::new();
    for a in gold.anchors().iter().filter(|a| a.role.is_event()) {
        if rng.gen_bool(0.15) {
            continue;
        }
        let mut span = a.span;
        if rng.gen_bool(0.25) {
            let shift = rng.gen_range(0..=2usize);
            span = Span {
                start: span.start.saturating_sub(shift),
                end: span.end.saturating_sub(shift),
            };
        }
        let role = if rng.gen_bool(0.2) {
            *[Role::Impulse, Role::Resonance, Role::Pause].choose(rng).unwrap()
        } else {
            a.role
        };
        let head = if rng.gen_bool(0.25) {
            if rng.gen_bool(0.5) {
                -1
            } else {
                rng.gen_range(0..20) as i64
            }
        } else {
            a.head.map_or(-1, i64::from)
        };
        rows.push(PredictionRow {
            id: a.id,
            category: role,
            span,
            word: a.word.clone(),
            head,
        });
        if rng.gen_bool(0.1) {
            let again = rows.last().unwrap().clone();
            rows.push(again);
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let start = rng.gen_range(0..400usize);
        rows.push(PredictionRow {
            id: 50 + rng.gen_range(0..50),
            category: *[Role::Impulse, Role::Resonance, Role::Pause].choose(rng).unwrap(),
            span: Span {
                start,
                end: start + rng.gen_range(1..6usize),
            },
            word: VOCAB[rng.gen_range(0..VOCAB.len())].to_string(),
            head: -1,
        });
    }
    rows.shuffle(rng);
    rows
}

/// A random matcher configuration covering the whole flag space.
pub fn random_match_config(rng: &mut StdRng) -> MatchConfig {
    MatchConfig {
        span_match: if rng.gen_bool(0.5) {
            SpanMatch::Exact
        } else {
            SpanMatch::WordWindow(rng.gen_range(0..=3))
        },
        role_required_for_anchor: rng.gen_bool(0.5),
        dep_labeled: rng.gen_bool(0.5),
        include_root_edges: rng.gen_bool(0.5),
        include_backbone_edges: rng.gen_bool(0.5),
        aggregation: litvista::scoring::Aggregation::Micro,
    }
}

fn span_ok(cfg: &MatchConfig, ps: Span, pw: &str, gs: Span, gw: &str) -> bool {
    match cfg.span_match {
        SpanMatch::Exact => ps == gs,
        SpanMatch::WordWindow(k) => pw == gw && ps.start.abs_diff(gs.start) <= k,
    }
}

/// Optimal assignment by exhaustive search over the right-hand side.
pub fn exhaustive_matching(adj: &[Vec<usize>]) -> u64 {
    fn go(
        i: usize,
        used: u64,
        adj: &[Vec<usize>],
        memo: &mut HashMap<(usize, u64), u64>,
    ) -> u64 {
        if i == adj.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut best = go(i + 1, used, adj, memo);
        for &j in &adj[i] {
            if used & (1 << j) == 0 {
                best = best.max(1 + go(i + 1, used | (1 << j), adj, memo));
            }
        }
        memo.insert((i, used), best);
        best
    }
    go(0, 0, adj, &mut HashMap::new())
}

fn dedup<'a>(pred: &'a [PredictionRow]) -> (Vec<&'a PredictionRow>, u64) {
    let mut seen: HashMap<(Span, Role), ()> = HashMap::new();
    let mut kept = Vec::new();
    let mut duplicates = 0;
    for row in pred {
        if seen.insert((row.span, row.category), ()).is_none() {
            kept.push(row);
        } else {
            duplicates += 1;
        }
    }
    (kept, duplicates)
}

/// (tp, fp, fn) for anchors, by brute force.
pub fn oracle_anchor_counts(
    pred: &[PredictionRow],
    gold: &NarrativeGraph,
    cfg: &MatchConfig,
) -> (u64, u64, u64) {
    let (rows, duplicates) = dedup(pred);
    let gold_anchors: Vec<&Anchor> =
        gold.anchors().iter().filter(|a| a.role.is_event()).collect();
    let adj: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| {
            gold_anchors
                .iter()
                .enumerate()
                .filter(|(_, g)| {
                    span_ok(cfg, r.span, &r.word, g.span, &g.word)
                        && (!cfg.role_required_for_anchor || r.category == g.role)
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let tp = exhaustive_matching(&adj);
    (
        tp,
        rows.len() as u64 - tp + duplicates,
        gold_anchors.len() as u64 - tp,
    )
}

type OracleEdge = (Span, String, Role, Option<(Span, String, Role)>);

/// (tp, fp, fn) for dependency edges, by brute force.
pub fn oracle_dependency_counts(
    pred: &[PredictionRow],
    gold: &NarrativeGraph,
    cfg: &MatchConfig,
) -> (u64, u64, u64) {
    let (rows, duplicates) = dedup(pred);
    let mut by_id: HashMap<u32, &PredictionRow> = HashMap::new();
    for row in pred {
        by_id.entry(row.id).or_insert(row);
    }

    let mut pred_edges: Vec<OracleEdge> = Vec::new();
    let mut dangling = 0u64;
    for row in rows {
        if row.head < 0 {
            if cfg.include_root_edges {
                pred_edges.push((row.span, row.word.clone(), row.category, None));
            }
            continue;
        }
        match u32::try_from(row.head).ok().and_then(|id| by_id.get(&id)) {
            Some(h) => pred_edges.push((
                row.span,
                row.word.clone(),
                row.category,
                Some((h.span, h.word.clone(), h.category)),
            )),
            None => dangling += 1,
        }
    }

    let mut gold_edges: Vec<OracleEdge> = Vec::new();
    for a in gold.anchors().iter().filter(|a| a.role.is_event()) {
        match a.head.and_then(|h| gold.anchor(h)) {
            Some(h) => gold_edges.push((
                a.span,
                a.word.clone(),
                a.role,
                Some((h.span, h.word.clone(), h.role)),
            )),
            None => {
                if cfg.include_root_edges {
                    gold_edges.push((a.span, a.word.clone(), a.role, None));
                }
            }
        }
    }

    if !cfg.include_backbone_edges {
        let backbone = |e: &OracleEdge| {
            e.2 == Role::Impulse && e.3.as_ref().is_some_and(|h| h.2 == Role::Impulse)
        };
        pred_edges.retain(|e| !backbone(e));
        gold_edges.retain(|e| !backbone(e));
    }

    let compatible = |p: &OracleEdge, g: &OracleEdge| {
        if !span_ok(cfg, p.0, &p.1, g.0, &g.1) {
            return false;
        }
        match (&p.3, &g.3) {
            (None, None) => {}
            (Some(ph), Some(gh)) => {
                if !span_ok(cfg, ph.0, &ph.1, gh.0, &gh.1) {
                    return false;
                }
                if cfg.dep_labeled && ph.2 != gh.2 {
                    return false;
                }
            }
            _ => return false,
        }
        !(cfg.dep_labeled && p.2 != g.2)
    };

    let adj: Vec<Vec<usize>> = pred_edges
        .iter()
        .map(|p| {
            gold_edges
                .iter()
                .enumerate()
                .filter(|(_, g)| compatible(p, g))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let tp = exhaustive_matching(&adj);
    (
        tp,
        pred_edges.len() as u64 - tp + dangling + duplicates,
        gold_edges.len() as u64 - tp,
    )
}

/// Crossing-pair recount straight from the definition, using anchor fields
/// instead of the library's edge iterator.
pub fn oracle_crossing_count(graph: &NarrativeGraph) -> u64 {
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for a in graph.anchors() {
        if let Some(h) = a.head.and_then(|h| graph.anchor(h)) {
            let (lo, hi) = if a.span.start <= h.span.start {
                (a.span.start, h.span.start)
            } else {
                (h.span.start, a.span.start)
            };
            intervals.push((lo, hi));
        }
    }
    let mut count = 0;
    for i in 0..intervals.len() {
        for j in i + 1..intervals.len() {
            let (a, b) = intervals[i];
            let (c, d) = intervals[j];
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                count += 1;
            }
        }
    }
    count
}

/// Long-range recount straight from the definition.
pub fn oracle_long_range_count(graph: &NarrativeGraph, threshold: usize) -> u64 {
    graph
        .anchors()
        .iter()
        .filter_map(|a| {
            let head = a.head.and_then(|h| graph.anchor(h))?;
            Some(a.span.start.abs_diff(head.span.start))
        })
        .filter(|&d| d > threshold)
        .count() as u64
}

/// 1-based position of `id`'s nearest Impulse ancestor (self included) among
/// the Impulses in span order; 0 when the head path never meets an Impulse.
pub fn oracle_governing_tau(graph: &NarrativeGraph, id: u32) -> u32 {
    let order: Vec<u32> = graph
        .anchors()
        .iter()
        .filter(|a| a.role == Role::Impulse)
        .map(|a| a.id)
        .collect();
    let mut cur = graph.anchor(id);
    while let Some(a) = cur {
        if a.role == Role::Impulse {
            return order.iter().position(|&x| x == a.id).map(|p| p as u32 + 1).unwrap_or(0);
        }
        cur = a.head.and_then(|h| graph.anchor(h));
    }
    0
}

/// Resonance depth recomputed bottom-up: every Pause credits each Resonance
/// strictly above it on the head path.
pub fn oracle_resonance_y(graph: &NarrativeGraph, id: u32, delta: f64) -> f64 {
    let mut credit = 0u64;
    for p in graph.anchors().iter().filter(|a| a.role == Role::Pause) {
        let mut cur = graph.anchor(p.id).and_then(|a| a.head).and_then(|h| graph.anchor(h));
        while let Some(a) = cur {
            if a.id == id {
                credit += 1;
                break;
            }
            cur = a.head.and_then(|h| graph.anchor(h));
        }
    }
    credit as f64 * delta
}

// ---------------------------------------------------------------------------
// Per-case checks shared by the property suite and the acceptance harness.
// Each takes a seed so both proptest and a plain loop can drive it.
// ---------------------------------------------------------------------------

use litvista::analysis::{
    distance_histogram, lexical_role_space, EdgeClassify, DEFAULT_BUCKET_EDGES,
};
use litvista::format::{
    parse_inline, parse_model_output_tolerant, parse_prediction_table, serialize_inline,
    serialize_prediction_table, IndexPolicy, TagMap,
};
use litvista::scoring::{anchor_prf, dependency_prf, Prf};
use litvista::topology::{
    backbone, cross_dependency_count, validate, vista_coordinates, CrossDef, DeltaConfig, Mode,
};

pub fn check_anchor_scorer(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let gold = random_graph(&mut rng, 8, true);
    let pred = mutate_predictions(&mut rng, &gold);
    let cfg = random_match_config(&mut rng);
    let got = anchor_prf(&pred, &gold, &cfg);
    let (tp, fp, fn_count) = oracle_anchor_counts(&pred, &gold, &cfg);
    assert_eq!(
        got,
        Prf::from_counts(tp, fp, fn_count),
        "anchor scorer disagrees with exhaustive matching (seed {seed})"
    );
}

pub fn check_dependency_scorer(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let gold = random_graph(&mut rng, 8, true);
    let pred = mutate_predictions(&mut rng, &gold);
    let cfg = random_match_config(&mut rng);
    let got = dependency_prf(&pred, &gold, &cfg);
    let (tp, fp, fn_count) = oracle_dependency_counts(&pred, &gold, &cfg);
    assert_eq!(
        got,
        Prf::from_counts(tp, fp, fn_count),
        "dependency scorer disagrees with exhaustive matching (seed {seed})"
    );
}

pub fn check_crossing(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let graph = random_graph(&mut rng, 50, true);
    let got = cross_dependency_count(&graph, CrossDef::Crossing).expect("generated graphs valid");
    assert_eq!(got, oracle_crossing_count(&graph), "crossing recount (seed {seed})");
    let t = rng.gen_range(0..200usize);
    let lr = cross_dependency_count(&graph, CrossDef::LongRange(t)).unwrap();
    assert_eq!(lr, oracle_long_range_count(&graph, t), "long-range recount (seed {seed})");
}

pub fn check_table_round_trip(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let rows = random_rows(&mut rng);
    let text = serialize_prediction_table(&rows);
    let back = parse_prediction_table(&text).expect("canonical tables parse strictly");
    assert_eq!(back, rows, "strict parse of serialize is the identity (seed {seed})");
    assert_eq!(
        serialize_prediction_table(&back),
        text,
        "serialization is canonical after one pass (seed {seed})"
    );
    let (tolerant_rows, diag) = parse_model_output_tolerant(&text);
    assert_eq!(tolerant_rows, rows, "tolerant equals strict on clean tables (seed {seed})");
    assert_eq!(diag.fatal, rows.is_empty());
    assert_eq!(diag.repaired_rows, 0);
}

pub fn check_inline_round_trip(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let tagged = random_tagged_text(&mut rng);
    let tags = TagMap::standard();
    let first = parse_inline(&tagged, "prop", &tags).expect("generator emits valid markup");
    for policy in [IndexPolicy::All, IndexPolicy::Minimal] {
        let emitted =
            serialize_inline(&first, policy, &tags).expect("parsed graphs are representable");
        let again = parse_inline(&emitted, "prop", &tags).expect("serializer output parses");
        assert_eq!(first, again, "inline round trip (seed {seed}, {policy:?})");
        assert!(
            litvista::format::verify_graph_spans(&again).is_empty(),
            "anchor spans slice their words (seed {seed})"
        );
    }
}

pub fn check_tolerant_is_total(bytes: &[u8]) {
    let text = String::from_utf8_lossy(bytes);
    let (rows, diag) = parse_model_output_tolerant(&text);
    assert_eq!(diag.fatal, rows.is_empty(), "fatal means no rows recovered");
}

pub fn check_strict_implies_relaxed(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let relaxed_chains = rng.gen_bool(0.5);
    let base = random_graph(&mut rng, 12, relaxed_chains);
    let graph = if rng.gen_bool(0.6) {
        corrupt_graph(&mut rng, &base)
    } else {
        base
    };
    let strict = validate(&graph, Mode::Strict);
    let relaxed = validate(&graph, Mode::Relaxed);
    if strict.is_valid() {
        assert!(
            relaxed.is_valid(),
            "strict-valid graph must be relaxed-valid (seed {seed}): {:?}",
            relaxed.violations
        );
    }
    for v in &relaxed.violations {
        assert!(
            strict
                .violations
                .iter()
                .any(|s| s.anchor == v.anchor && s.kind == v.kind),
            "relaxed violations are a subset of strict ones (seed {seed}): {v}"
        );
    }
}

pub fn check_coordinates(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let graph = random_graph(&mut rng, 20, true);
    let delta_val = *[0.25, 0.5, 0.75].choose(&mut rng).unwrap();
    let cfg = DeltaConfig::new(delta_val).unwrap();
    let points = vista_coordinates(&graph, &cfg).expect("generated graphs are relaxed-valid");

    let events: Vec<&Anchor> = graph.anchors().iter().filter(|a| a.role.is_event()).collect();
    assert_eq!(points.len(), events.len());
    let by_id: HashMap<u32, _> = points.iter().map(|p| (p.anchor, p)).collect();

    for a in &events {
        let p = by_id[&a.id];
        assert_eq!(p.z == 1, a.role == Role::Pause, "z marks Pauses only (seed {seed})");
        assert_eq!(
            p.x,
            oracle_governing_tau(&graph, a.id),
            "x is the governing Impulse position (seed {seed}, anchor {})",
            a.id
        );
        match a.role {
            Role::Impulse => assert_eq!(p.y, 0.0),
            Role::Resonance => {
                let want = oracle_resonance_y(&graph, a.id, delta_val);
                assert!((p.y - want).abs() < 1e-12, "resonance depth (seed {seed})");
                let steps = (p.y / delta_val).round();
                assert!(
                    p.y >= 0.0 && steps >= 0.0 && (p.y - steps * delta_val).abs() < 1e-9,
                    "y is a non-negative multiple of the step (seed {seed})"
                );
            }
            Role::Pause => {
                let want = match a.head.and_then(|h| graph.anchor(h)) {
                    Some(parent) if parent.role == Role::Resonance => by_id[&parent.id].y,
                    _ => 0.0,
                };
                assert_eq!(p.y, want, "pause inherits its Resonance parent depth (seed {seed})");
            }
            Role::NonEvent => unreachable!("filtered"),
        }
    }

    let pairs = backbone(&graph).unwrap();
    let taus: Vec<u32> = pairs.iter().map(|&(_, t)| t).collect();
    let want: Vec<u32> = (1..=taus.len() as u32).collect();
    assert_eq!(taus, want, "backbone numbering is gapless (seed {seed})");
    for (id, tau) in pairs {
        assert_eq!(by_id[&id].x, tau, "impulse x equals its own position (seed {seed})");
    }
}

pub fn check_analysis_conservation(seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let graphs: Vec<NarrativeGraph> = (0..rng.gen_range(1..=4))
        .map(|_| random_graph(&mut rng, 15, true))
        .collect();
    let edge_count: u64 = graphs
        .iter()
        .flat_map(|g| g.anchors())
        .filter(|a| a.head.is_some())
        .count() as u64;

    let by_child = distance_histogram(&graphs, DEFAULT_BUCKET_EDGES, EdgeClassify::ChildRole);
    let by_pair = distance_histogram(&graphs, DEFAULT_BUCKET_EDGES, EdgeClassify::RolePair);
    let custom = distance_histogram(&graphs, &[0, 7, 23], EdgeClassify::ChildRole);
    assert_eq!(by_child.total(), edge_count, "child-role cells conserve edges (seed {seed})");
    assert_eq!(by_pair.total(), edge_count, "role-pair cells conserve edges (seed {seed})");
    assert_eq!(custom.total(), edge_count, "custom buckets conserve edges (seed {seed})");

    for s in lexical_role_space(&graphs, 1) {
        assert!((-1.0..=1.0).contains(&s.x), "x bounded (seed {seed}, word {})", s.word);
        assert!((-1.0..=1.0).contains(&s.y), "y bounded (seed {seed}, word {})", s.word);
        let t = s.total as f64;
        assert_eq!(s.x, (s.c_impulse as f64 - s.c_resonance as f64) / t);
        assert_eq!(s.y, (s.c_pause as f64 - s.c_resonance as f64) / t);
        let direct = (s.c_impulse as f64 + s.c_pause as f64 - 2.0 * s.c_resonance as f64) / t;
        assert!(
            (s.x + s.y - direct).abs() <= 1e-15,
            "x+y identity within one ulp (seed {seed}, word {})",
            s.word
        );
    }
}

/// Canonical event-only rows that the strict parser must accept.
pub fn random_rows(rng: &mut StdRng) -> Vec<PredictionRow> {
    let n = rng.gen_range(1..=15);
    let mut ids: Vec<u32> = (0..40).collect();
    ids.shuffle(rng);
    (0..n)
        .map(|i| {
            let start = rng.gen_range(0..5000usize);
            PredictionRow {
                id: ids[i],
                category: *[Role::Impulse, Role::Resonance, Role::Pause].choose(rng).unwrap(),
                span: Span {
                    start,
                    end: start + rng.gen_range(1..12usize),
                },
                word: VOCAB[rng.gen_range(0..VOCAB.len())].to_string(),
                head: if rng.gen_bool(0.3) {
                    -1
                } else {
                    rng.gen_range(0..40) as i64
                },
            }
        })
        .collect()
}

/// Tagged text the inline parser accepts by construction.
pub fn random_tagged_text(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..=12);
    let mut impulses = 0u32;
    // Only explicitly numbered Impulses can be referenced with '#'.
    let mut referable: Vec<u32> = Vec::new();
    let mut out: Vec<String> = Vec::new();
    for _ in 0..n {
        let word = VOCAB[rng.gen_range(0..VOCAB.len())];
        let draw: f64 = rng.gen();
        if draw < 0.25 {
            out.push(word.to_string());
        } else if draw < 0.50 {
            impulses += 1;
            if rng.gen_bool(0.5) {
                referable.push(impulses);
                out.push(format!("<Impulse>{word}@{impulses}</Impulse>"));
            } else {
                out.push(format!("<Impulse>{word}</Impulse>"));
            }
        } else if draw < 0.75 {
            if !referable.is_empty() && rng.gen_bool(0.5) {
                let tau = referable[rng.gen_range(0..referable.len())];
                out.push(format!("<Resonance>{word}#{tau}</Resonance>"));
            } else {
                out.push(format!("<Resonance>{word}</Resonance>"));
            }
        } else if draw < 0.90 {
            if !referable.is_empty() && rng.gen_bool(0.5) {
                let tau = referable[rng.gen_range(0..referable.len())];
                out.push(format!("<Pause>{word}#{tau}</Pause>"));
            } else {
                out.push(format!("<Pause>{word}</Pause>"));
            }
        } else {
            out.push(format!("<NonEvent>{word}</NonEvent>"));
        }
    }
    out.join(" ")
}
