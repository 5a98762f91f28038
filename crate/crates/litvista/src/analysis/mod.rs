//! Corpus statistics, dependency-distance histograms, lexical role
//! preferences, and story-shape exports.
//!
//! Everything here is a pure reduction over narrative graphs: per-document
//! counts averaged into [`CorpusStats`], non-root edges bucketed by
//! character distance into a [`DistanceTable`], per-word role counts
//! projected into the [−1,1]² preference square, and per-anchor coordinate
//! records ready for CSV or SVG. All reductions are associative and
//! commutative, so document order never matters.

mod svg;

use std::collections::BTreeMap;

use serde::Serialize;

pub use svg::{
    affine_map, emit_svg, render_svg, scatter_from_lexicon, scatter_from_shape, Plot,
    ScatterPoint, SvgError,
};

use crate::topology::{
    cross_dependency_count, vista_coordinates, CrossDef, DeltaConfig, NarrativeGraph, Role,
    TopologyError,
};

/// Log-spaced distance bucket edges; the final bucket is open-ended.
pub const DEFAULT_BUCKET_EDGES: &[usize] = &[0, 10, 50, 100, 500, 1000, 5000];

/// Per-split averages over documents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub documents: usize,
    /// Mean whitespace-token count of the stored text.
    pub avg_length_tokens: f64,
    pub avg_count_impulse: f64,
    pub avg_count_resonance: f64,
    pub avg_count_pause: f64,
    /// Mean properly-crossing edge-pair count per document.
    pub avg_cross_dep: f64,
}

/// Averages per-document counts over a split of relaxed-valid graphs.
///
/// An empty split yields all-zero stats.
pub fn corpus_stats(split: &[NarrativeGraph]) -> Result<CorpusStats, TopologyError> {
    let mut tokens = 0u64;
    let mut impulses = 0u64;
    let mut resonances = 0u64;
    let mut pauses = 0u64;
    let mut crossings = 0u64;
    for graph in split {
        crossings += cross_dependency_count(graph, CrossDef::Crossing)?;
        tokens += graph.text().split_whitespace().count() as u64;
        for anchor in graph.anchors() {
            match anchor.role {
                Role::Impulse => impulses += 1,
                Role::Resonance => resonances += 1,
                Role::Pause => pauses += 1,
                Role::NonEvent => {}
            }
        }
    }
    let n = split.len();
    let avg = |sum: u64| if n == 0 { 0.0 } else { sum as f64 / n as f64 };
    Ok(CorpusStats {
        documents: n,
        avg_length_tokens: avg(tokens),
        avg_count_impulse: avg(impulses),
        avg_count_resonance: avg(resonances),
        avg_count_pause: avg(pauses),
        avg_cross_dep: avg(crossings),
    })
}

/// How a non-root edge picks its histogram row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClassify {
    /// Row per child role.
    ChildRole,
    /// Row per child-to-head role pair.
    RolePair,
}

/// Edge counts bucketed by absolute start-to-start character distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceTable {
    /// Strictly increasing, starting at 0; bucket i covers
    /// [edges[i], edges[i+1]) and the last bucket is open-ended.
    pub bucket_edges: Vec<usize>,
    /// Row label to per-bucket counts, one cell per bucket edge.
    pub rows: BTreeMap<String, Vec<u64>>,
}

impl DistanceTable {
    /// Sum of every cell; equals the number of non-root edges counted.
    pub fn total(&self) -> u64 {
        self.rows.values().flatten().sum()
    }

    /// Human-readable interval label for bucket `idx`.
    pub fn bucket_label(&self, idx: usize) -> String {
        let lo = self.bucket_edges[idx];
        match self.bucket_edges.get(idx + 1) {
            Some(hi) => format!("[{lo},{hi})"),
            None => format!("[{lo},inf)"),
        }
    }
}

/// Buckets every non-root edge by |child.start − head.start|.
///
/// Panics when `bucket_edges` is empty, does not start at 0, or is not
/// strictly increasing; every distance must land in exactly one bucket.
pub fn distance_histogram(
    graphs: &[NarrativeGraph],
    bucket_edges: &[usize],
    classify: EdgeClassify,
) -> DistanceTable {
    assert!(
        !bucket_edges.is_empty() && bucket_edges[0] == 0,
        "bucket edges must start at 0"
    );
    assert!(
        bucket_edges.windows(2).all(|w| w[0] < w[1]),
        "bucket edges must increase strictly"
    );
    let mut rows: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for graph in graphs {
        for anchor in graph.anchors() {
            let Some(head) = graph.head_of(anchor.id) else {
                continue;
            };
            let distance = anchor.span.start.abs_diff(head.span.start);
            // Last bucket whose lower edge does not exceed the distance.
            let bucket = bucket_edges
                .iter()
                .rposition(|&edge| edge <= distance)
                .expect("edges start at 0");
            let label = match classify {
                EdgeClassify::ChildRole => anchor.role.name().to_owned(),
                EdgeClassify::RolePair => {
                    format!("{}->{}", anchor.role.name(), head.role.name())
                }
            };
            rows.entry(label).or_insert_with(|| vec![0; bucket_edges.len()])[bucket] += 1;
        }
    }
    DistanceTable {
        bucket_edges: bucket_edges.to_vec(),
        rows,
    }
}

/// Role counts and preference coordinates for one lowercased word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexicalRoleStats {
    pub word: String,
    pub c_impulse: u64,
    pub c_resonance: u64,
    pub c_pause: u64,
    pub total: u64,
    /// Impulse-vs-Resonance preference, (c_I − c_R)/total.
    pub x: f64,
    /// Pause-vs-Resonance preference, (c_P − c_R)/total.
    pub y: f64,
}

impl LexicalRoleStats {
    pub fn new(
        word: impl Into<String>,
        c_impulse: u64,
        c_resonance: u64,
        c_pause: u64,
    ) -> LexicalRoleStats {
        let total = c_impulse + c_resonance + c_pause;
        let ratio = |num: i64| {
            if total == 0 {
                0.0
            } else {
                num as f64 / total as f64
            }
        };
        LexicalRoleStats {
            word: word.into(),
            c_impulse,
            c_resonance,
            c_pause,
            total,
            x: ratio(c_impulse as i64 - c_resonance as i64),
            y: ratio(c_pause as i64 - c_resonance as i64),
        }
    }

    /// Most frequent role; ties prefer Resonance, then Impulse, then Pause.
    pub fn majority_role(&self) -> Role {
        let ranked = [
            (Role::Resonance, self.c_resonance),
            (Role::Impulse, self.c_impulse),
            (Role::Pause, self.c_pause),
        ];
        let best = ranked.iter().map(|&(_, c)| c).max().unwrap_or(0);
        ranked
            .iter()
            .find(|&&(_, c)| c == best)
            .map(|&(role, _)| role)
            .unwrap_or(Role::Resonance)
    }
}

/// Per-word role preferences over every event anchor in the input.
///
/// Words are keyed by lowercased surface form with no lemmatization; words
/// with total < `min_freq` are dropped. Output is sorted by word. Panics
/// when `min_freq` is 0.
pub fn lexical_role_space(graphs: &[NarrativeGraph], min_freq: u64) -> Vec<LexicalRoleStats> {
    assert!(min_freq >= 1, "min_freq must be >= 1");
    let mut counts: BTreeMap<String, (u64, u64, u64)> = BTreeMap::new();
    for graph in graphs {
        for anchor in graph.anchors() {
            let slot = match anchor.role {
                Role::Impulse => 0,
                Role::Resonance => 1,
                Role::Pause => 2,
                Role::NonEvent => continue,
            };
            let entry = counts.entry(anchor.word.to_lowercase()).or_default();
            match slot {
                0 => entry.0 += 1,
                1 => entry.1 += 1,
                _ => entry.2 += 1,
            }
        }
    }
    counts
        .into_iter()
        .map(|(word, (c_i, c_r, c_p))| LexicalRoleStats::new(word, c_i, c_r, c_p))
        .filter(|stats| stats.total >= min_freq)
        .collect()
}

/// One event anchor placed in the narrative space, ready for CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeRecord {
    pub id: u32,
    pub word: String,
    pub role: Role,
    pub x: u32,
    pub y: f64,
    pub z: u8,
}

/// Coordinate records for every event anchor, in textual order.
pub fn story_shape_export(
    graph: &NarrativeGraph,
    cfg: &DeltaConfig,
) -> Result<Vec<ShapeRecord>, TopologyError> {
    let points = vista_coordinates(graph, cfg)?;
    Ok(points
        .into_iter()
        .map(|p| {
            let anchor = graph.anchor(p.anchor).expect("point from this graph");
            ShapeRecord {
                id: anchor.id,
                word: anchor.word.clone(),
                role: anchor.role,
                x: p.x,
                y: p.y,
                z: p.z,
            }
        })
        .collect())
}

/// Quotes a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_owned()
    }
}

/// Header: split,documents,avg_length_tokens,avg_count_impulse,avg_count_resonance,avg_count_pause,avg_cross_dep
pub fn corpus_stats_csv(entries: &[(&str, &CorpusStats)]) -> String {
    let mut out = String::from(
        "split,documents,avg_length_tokens,avg_count_impulse,avg_count_resonance,avg_count_pause,avg_cross_dep\n",
    );
    for (split, s) in entries {
        out.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            csv_field(split),
            s.documents,
            s.avg_length_tokens,
            s.avg_count_impulse,
            s.avg_count_resonance,
            s.avg_count_pause,
            s.avg_cross_dep
        ));
    }
    out
}

/// Header: type,bucket,count
pub fn distance_csv(table: &DistanceTable) -> String {
    let mut out = String::from("type,bucket,count\n");
    for (label, cells) in &table.rows {
        for (idx, count) in cells.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{count}\n",
                csv_field(label),
                csv_field(&table.bucket_label(idx))
            ));
        }
    }
    out
}

/// Header: word,c_impulse,c_resonance,c_pause,total,x,y
pub fn lexicon_csv(stats: &[LexicalRoleStats]) -> String {
    let mut out = String::from("word,c_impulse,c_resonance,c_pause,total,x,y\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{:.4},{:.4}\n",
            csv_field(&s.word),
            s.c_impulse,
            s.c_resonance,
            s.c_pause,
            s.total,
            s.x,
            s.y
        ));
    }
    out
}

/// Header: id,word,role,x,y,z
pub fn shape_csv(records: &[ShapeRecord]) -> String {
    let mut out = String::from("id,word,role,x,y,z\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{}\n",
            r.id,
            csv_field(&r.word),
            r.role.name(),
            r.x,
            r.y,
            r.z
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Anchor, Span};

    fn doc(doc_id: &str, words: &[(&str, Role, Option<u32>)]) -> NarrativeGraph {
        let mut text = String::new();
        let mut anchors = Vec::new();
        for (i, (word, role, head)) in words.iter().enumerate() {
            let start = text.chars().count();
            text.push_str(word);
            text.push(' ');
            anchors.push(Anchor {
                id: i as u32,
                span: Span {
                    start,
                    end: start + word.chars().count(),
                },
                word: (*word).to_owned(),
                role: *role,
                head: *head,
            });
        }
        NarrativeGraph::new(doc_id, text.trim_end(), anchors).unwrap()
    }

    #[test]
    fn corpus_stats_averages_counts() {
        let split = vec![
            doc(
                "d1",
                &[
                    ("a", Role::Impulse, None),
                    ("b", Role::Impulse, Some(0)),
                    ("c", Role::Impulse, Some(1)),
                    ("d", Role::Pause, Some(2)),
                ],
            ),
            doc(
                "d2",
                &[
                    ("e", Role::Impulse, None),
                    ("f", Role::Impulse, Some(0)),
                    ("g", Role::Resonance, Some(1)),
                ],
            ),
        ];
        let stats = corpus_stats(&split).unwrap();
        assert_eq!(stats.documents, 2);
        assert_eq!(stats.avg_count_impulse, 2.5);
        assert_eq!(stats.avg_count_resonance, 0.5);
        assert_eq!(stats.avg_count_pause, 0.5);
        assert_eq!(stats.avg_length_tokens, 3.5);
        assert_eq!(stats.avg_cross_dep, 0.0);

        let mut reversed = split.clone();
        reversed.reverse();
        assert_eq!(corpus_stats(&reversed).unwrap(), stats);
    }

    #[test]
    fn corpus_stats_of_empty_documents_is_zero() {
        let empty = NarrativeGraph::new("d", "some untagged text", vec![]).unwrap();
        let stats = corpus_stats(&[empty]).unwrap();
        assert_eq!(stats.avg_count_impulse, 0.0);
        assert_eq!(stats.avg_count_resonance, 0.0);
        assert_eq!(stats.avg_count_pause, 0.0);
        assert_eq!(stats.avg_cross_dep, 0.0);
        assert_eq!(stats.avg_length_tokens, 3.0);

        let none = corpus_stats(&[]).unwrap();
        assert_eq!(none.documents, 0);
        assert_eq!(none.avg_length_tokens, 0.0);
    }

    #[test]
    fn corpus_stats_counts_crossings_and_rejects_invalid_graphs() {
        // Child/head start pairs (4,0) and (6,2) cross properly.
        let crossing = doc(
            "x",
            &[
                ("a", Role::Impulse, None),
                ("b", Role::Impulse, None),
                ("c", Role::Resonance, Some(0)),
                ("d", Role::Resonance, Some(1)),
            ],
        );
        let stats = corpus_stats(&[crossing]).unwrap();
        assert_eq!(stats.avg_cross_dep, 1.0);

        // Resonance headed by a Pause is invalid even relaxed.
        let bad = doc(
            "bad",
            &[("a", Role::Pause, None), ("b", Role::Resonance, Some(0))],
        );
        assert!(corpus_stats(&[bad]).is_err());
    }

    #[test]
    fn distance_histogram_buckets_by_start_distance() {
        let g = doc(
            "d",
            &[("aaaa", Role::Impulse, None), ("b", Role::Resonance, Some(0))],
        );
        // Edge distance is 5: "aaaa " occupies chars 0..5.
        let table = distance_histogram(&[g], &[0, 10, 100], EdgeClassify::ChildRole);
        assert_eq!(table.rows["Resonance"], vec![1, 0, 0]);
        assert_eq!(table.bucket_label(0), "[0,10)");
        assert_eq!(table.bucket_label(2), "[100,inf)");
        assert_eq!(table.total(), 1);
    }

    #[test]
    fn distance_histogram_conserves_edge_count() {
        let g = doc(
            "d",
            &[
                ("a", Role::Impulse, None),
                ("b", Role::Impulse, Some(0)),
                ("c", Role::Impulse, Some(1)),
                ("d", Role::Resonance, Some(2)),
                ("e", Role::Resonance, Some(3)),
                ("f", Role::Pause, Some(4)),
                ("g", Role::Pause, Some(5)),
                ("h", Role::Resonance, Some(2)),
            ],
        );
        let table = distance_histogram(&[g], DEFAULT_BUCKET_EDGES, EdgeClassify::RolePair);
        assert_eq!(table.total(), 7);
        assert!(table.rows.contains_key("Resonance->Impulse"));
        assert!(table.rows.contains_key("Pause->Resonance"));
    }

    #[test]
    fn distance_histogram_spreads_known_distances() {
        // Heads all on anchor 0; children at starts 3, 50, 5000.
        let mut anchors = vec![Anchor {
            id: 0,
            span: Span { start: 0, end: 1 },
            word: "w0".into(),
            role: Role::Impulse,
            head: None,
        }];
        for (id, start) in [(1u32, 3usize), (2, 50), (3, 5000)] {
            anchors.push(Anchor {
                id,
                span: Span {
                    start,
                    end: start + 1,
                },
                word: format!("w{id}"),
                role: Role::Resonance,
                head: Some(0),
            });
        }
        let text: String = " ".repeat(5001);
        let g = NarrativeGraph::new("d", text, anchors).unwrap();
        let table = distance_histogram(&[g], DEFAULT_BUCKET_EDGES, EdgeClassify::ChildRole);
        let cells = &table.rows["Resonance"];
        assert_eq!(cells[0], 1);
        assert_eq!(cells[2], 1);
        assert_eq!(cells[6], 1);
        assert_eq!(table.total(), 3);
    }

    #[test]
    #[should_panic(expected = "increase strictly")]
    fn distance_histogram_rejects_unsorted_edges() {
        distance_histogram(&[], &[0, 10, 10], EdgeClassify::ChildRole);
    }

    #[test]
    fn lexical_coordinates_follow_the_formulas() {
        let only_impulse = LexicalRoleStats::new("ran", 3, 0, 0);
        assert_eq!((only_impulse.x, only_impulse.y), (1.0, 0.0));

        let balanced = LexicalRoleStats::new("saw", 2, 2, 0);
        assert_eq!(balanced.x, 0.0);

        let mixed = LexicalRoleStats::new("thought", 1, 2, 1);
        assert_eq!((mixed.x, mixed.y), (-0.25, -0.25));
        assert_eq!(mixed.total, 4);
    }

    #[test]
    fn lexical_sum_identity_holds_in_integers_not_floats() {
        // As rationals x + y = (c_I + c_P - 2 c_R)/total exactly; the
        // integer numerators prove it for every count triple.
        let (c_i, c_r, c_p) = (10i64, 7i64, 13i64);
        assert_eq!((c_i - c_r) + (c_p - c_r), c_i + c_p - 2 * c_r);

        // Adding the two f64 quotients drifts off the direct quotient for
        // these counts, which is why the identity is tested in integers.
        let s = LexicalRoleStats::new("w", 10, 7, 13);
        let direct = (10.0 + 13.0 - 2.0 * 7.0) / 30.0;
        assert_ne!(s.x + s.y, direct);
        assert!((s.x + s.y - direct).abs() < 1e-15);
    }

    #[test]
    fn lexicon_lowercases_filters_and_sorts() {
        let g1 = doc(
            "d1",
            &[
                ("Ran", Role::Impulse, None),
                ("saw", Role::Impulse, Some(0)),
            ],
        );
        let g2 = doc(
            "d2",
            &[
                ("ran", Role::Resonance, None),
                ("ran", Role::Resonance, Some(0)),
            ],
        );
        let all = lexical_role_space(&[g1.clone(), g2.clone()], 1);
        let words: Vec<&str> = all.iter().map(|s| s.word.as_str()).collect();
        assert_eq!(words, vec!["ran", "saw"]);
        assert_eq!(all[0].c_impulse, 1);
        assert_eq!(all[0].c_resonance, 2);
        assert_eq!(all[0].total, 3);

        let frequent = lexical_role_space(&[g1, g2], 2);
        assert_eq!(frequent.len(), 1);
        assert_eq!(frequent[0].word, "ran");
    }

    #[test]
    fn majority_role_breaks_ties_toward_resonance_then_impulse() {
        assert_eq!(LexicalRoleStats::new("w", 2, 1, 0).majority_role(), Role::Impulse);
        assert_eq!(
            LexicalRoleStats::new("w", 1, 1, 0).majority_role(),
            Role::Resonance
        );
        assert_eq!(LexicalRoleStats::new("w", 1, 0, 1).majority_role(), Role::Impulse);
        assert_eq!(LexicalRoleStats::new("w", 0, 0, 2).majority_role(), Role::Pause);
        assert_eq!(
            LexicalRoleStats::new("w", 0, 0, 0).majority_role(),
            Role::Resonance
        );
    }

    #[test]
    fn story_shape_walks_the_backbone() {
        let g = doc(
            "d",
            &[
                ("a", Role::Impulse, None),
                ("b", Role::Impulse, Some(0)),
                ("c", Role::Impulse, Some(1)),
            ],
        );
        let records = story_shape_export(&g, &DeltaConfig::default()).unwrap();
        let xs: Vec<u32> = records.iter().map(|r| r.x).collect();
        assert_eq!(xs, vec![1, 2, 3]);
        assert!(records.iter().all(|r| r.y == 0.0 && r.z == 0));

        let empty = NarrativeGraph::new("e", "text", vec![]).unwrap();
        assert!(story_shape_export(&empty, &DeltaConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn story_shape_x_is_non_decreasing_for_strict_graphs() {
        let g = doc(
            "d",
            &[
                ("a", Role::Impulse, None),
                ("b", Role::Resonance, Some(0)),
                ("c", Role::Pause, Some(1)),
                ("d", Role::Impulse, Some(0)),
                ("e", Role::Resonance, Some(3)),
            ],
        );
        let records = story_shape_export(&g, &DeltaConfig::default()).unwrap();
        assert_eq!(records.len(), 5);
        assert!(records.windows(2).all(|w| w[0].x <= w[1].x));
        // Pause under a direct Resonance parent inherits its lateral offset
        // and carries the unit amplitude.
        assert_eq!(records[2].role, Role::Pause);
        assert_eq!(records[2].y, records[1].y);
        assert_eq!(records[2].z, 1);
    }

    #[test]
    fn csv_emitters_quote_and_format() {
        let stats = CorpusStats {
            documents: 2,
            avg_length_tokens: 3.5,
            avg_count_impulse: 2.5,
            avg_count_resonance: 0.5,
            avg_count_pause: 0.5,
            avg_cross_dep: 0.0,
        };
        let csv = corpus_stats_csv(&[("test", &stats)]);
        assert!(csv.starts_with("split,documents,"));
        assert!(csv.contains("test,2,3.5000,2.5000,0.5000,0.5000,0.0000\n"));

        let lex = vec![LexicalRoleStats::new("a,b", 1, 0, 0)];
        let csv = lexicon_csv(&lex);
        assert!(csv.contains("\"a,b\",1,0,0,1,1.0000,0.0000\n"));

        let shape = vec![ShapeRecord {
            id: 0,
            word: "ran".into(),
            role: Role::Impulse,
            x: 1,
            y: 0.0,
            z: 0,
        }];
        assert!(shape_csv(&shape).contains("0,ran,Impulse,1,0.0000,0\n"));

        let table = distance_histogram(&[], &[0, 10], EdgeClassify::ChildRole);
        assert_eq!(distance_csv(&table), "type,bucket,count\n");
    }
}
