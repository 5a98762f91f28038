//! Five-column prediction tables and three-column candidate lists.
//!
//! The strict parser round-trips with the serializer and rejects anything
//! off-template. The tolerant reader accepts raw model output: it strips
//! prose, markdown pipes and fences, merges split offset columns, joins
//! multi-token words, and keeps rows with degenerate offsets (they count as
//! predictions but can never match gold). It never panics on arbitrary
//! input.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{GraphError, NarrativeGraph, Role, Span};

/// Canonical header of the five-column table.
pub const TABLE_HEADER: &str = "ID\tCategory\tOffsets\tWord\tHead";

/// One row of the five-column prediction template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub id: u32,
    /// One of the three event roles; NonEvent never appears in predictions.
    pub category: Role,
    pub span: Span,
    pub word: String,
    /// Head anchor id; -1 is the root.
    pub head: i64,
}

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate candidate id {id}")]
    DuplicateCandidateId { id: u32 },
    #[error("anchor {id}: head {head} is neither -1 nor an anchor id")]
    InvalidHead { id: u32, head: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Strictly parses a five-column table. A single header line is allowed.
pub fn parse_prediction_table(text: &str) -> Result<Vec<PredictionRow>, TableError> {
    let mut rows = Vec::new();
    let mut saw_content = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if !saw_content && fields[0].eq_ignore_ascii_case("id") {
            saw_content = true;
            continue;
        }
        saw_content = true;
        if fields.len() != 5 {
            return Err(TableError::MalformedRow {
                line: line_no,
                reason: format!("expected 5 columns, found {}", fields.len()),
            });
        }
        let id: u32 = fields[0].parse().map_err(|_| TableError::MalformedRow {
            line: line_no,
            reason: format!("id '{}' is not a non-negative integer", fields[0]),
        })?;
        let category = Role::parse_ci(fields[1])
            .filter(|r| r.is_event())
            .ok_or_else(|| TableError::MalformedRow {
                line: line_no,
                reason: format!(
                    "category '{}' is not Impulse, Resonance, or Pause",
                    fields[1]
                ),
            })?;
        let span = parse_offsets_strict(fields[2]).ok_or_else(|| TableError::MalformedRow {
            line: line_no,
            reason: format!("offsets '{}' are not 'start,end' with start < end", fields[2]),
        })?;
        let head: i64 = fields[4].parse().map_err(|_| TableError::MalformedRow {
            line: line_no,
            reason: format!("head '{}' is not an integer", fields[4]),
        })?;
        if head < -1 {
            return Err(TableError::MalformedRow {
                line: line_no,
                reason: format!("head {head} is below -1"),
            });
        }
        rows.push(PredictionRow {
            id,
            category,
            span,
            word: fields[3].to_owned(),
            head,
        });
    }
    Ok(rows)
}

fn parse_offsets_strict(field: &str) -> Option<Span> {
    let (s, e) = field.split_once(',')?;
    let start: usize = s.parse().ok()?;
    let end: usize = e.parse().ok()?;
    Span::new(start, end).ok()
}

/// Serializes rows in canonical tab-separated form with a header.
pub fn serialize_prediction_table(rows: &[PredictionRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.id, r.category, r.span, r.word, r.head
        ));
    }
    out
}

/// Prediction rows for the event anchors of a graph, in span order.
pub fn prediction_rows_from_graph(graph: &NarrativeGraph) -> Vec<PredictionRow> {
    graph
        .anchors()
        .iter()
        .filter(|a| a.role.is_event())
        .map(|a| PredictionRow {
            id: a.id,
            category: a.role,
            span: a.span,
            word: a.word.clone(),
            head: a.head.map(i64::from).unwrap_or(-1),
        })
        .collect()
}

/// Builds a graph from canonical rows plus the document text.
pub fn graph_from_rows(
    doc_id: &str,
    text: &str,
    rows: &[PredictionRow],
) -> Result<NarrativeGraph, TableError> {
    let mut anchors = Vec::with_capacity(rows.len());
    for r in rows {
        let head = match r.head {
            -1 => None,
            h if h >= 0 && h <= u32::MAX as i64 => Some(h as u32),
            h => return Err(TableError::InvalidHead { id: r.id, head: h }),
        };
        anchors.push(crate::topology::Anchor {
            id: r.id,
            span: r.span,
            word: r.word.clone(),
            role: r.category,
            head,
        });
    }
    Ok(NarrativeGraph::new(doc_id, text, anchors)?)
}

/// One candidate anchor offered to a model: position and surface form only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: u32,
    pub span: Span,
    pub word: String,
}

/// Candidates ordered by span start, with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateList {
    entries: Vec<Candidate>,
}

impl CandidateList {
    /// Sorts by `(span.start, id)` and rejects duplicate ids.
    pub fn new(mut entries: Vec<Candidate>) -> Result<CandidateList, TableError> {
        entries.sort_by_key(|c| (c.span.start, c.id));
        let mut seen = BTreeSet::new();
        for c in &entries {
            if !seen.insert(c.id) {
                return Err(TableError::DuplicateCandidateId { id: c.id });
            }
        }
        Ok(CandidateList { entries })
    }

    /// Every anchor of the graph, roles and heads withheld.
    pub fn from_graph(graph: &NarrativeGraph) -> CandidateList {
        let entries = graph
            .anchors()
            .iter()
            .map(|a| Candidate {
                id: a.id,
                span: a.span,
                word: a.word.clone(),
            })
            .collect();
        // Graph anchors are span-sorted with unique ids already.
        CandidateList { entries }
    }

    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Strictly parses a three-column candidate list (`ID Offsets Word`).
pub fn parse_candidate_list(text: &str) -> Result<CandidateList, TableError> {
    let mut entries = Vec::new();
    let mut saw_content = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if !saw_content && fields[0].eq_ignore_ascii_case("id") {
            saw_content = true;
            continue;
        }
        saw_content = true;
        if fields.len() != 3 {
            return Err(TableError::MalformedRow {
                line: line_no,
                reason: format!("expected 3 columns, found {}", fields.len()),
            });
        }
        let id: u32 = fields[0].parse().map_err(|_| TableError::MalformedRow {
            line: line_no,
            reason: format!("id '{}' is not a non-negative integer", fields[0]),
        })?;
        let span = parse_offsets_strict(fields[1]).ok_or_else(|| TableError::MalformedRow {
            line: line_no,
            reason: format!("offsets '{}' are not 'start,end' with start < end", fields[1]),
        })?;
        entries.push(Candidate {
            id,
            span,
            word: fields[2].to_owned(),
        });
    }
    CandidateList::new(entries)
}

/// Serializes a candidate list in canonical tab-separated form.
pub fn serialize_candidate_list(list: &CandidateList) -> String {
    let mut out = String::new();
    for c in list.entries() {
        out.push_str(&format!("{}\t{}\t{}\n", c.id, c.span, c.word));
    }
    out
}

/// What the tolerant reader did to the input.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostics {
    /// Non-blank lines that yielded no row (prose, ellipses, garbage).
    pub skipped_lines: usize,
    pub skipped_samples: Vec<String>,
    /// Rows recovered after a mechanical fix.
    pub repaired_rows: usize,
    pub repairs: Vec<String>,
    /// Rows kept verbatim although they can never match gold.
    pub anomalous_rows: usize,
    pub anomalies: Vec<String>,
    /// True when no rows were recovered at all.
    pub fatal: bool,
}

const MAX_SAMPLES: usize = 8;

fn push_sample(samples: &mut Vec<String>, entry: String) {
    if samples.len() < MAX_SAMPLES {
        samples.push(entry);
    }
}

/// Reads rows out of raw model output. Never errors, never panics.
pub fn parse_model_output_tolerant(text: &str) -> (Vec<PredictionRow>, ParseDiagnostics) {
    let mut rows = Vec::new();
    let mut diag = ParseDiagnostics::default();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with("```") {
            continue;
        }
        // Markdown table pipes and emphasis markers become whitespace.
        let cleaned: String = trimmed
            .chars()
            .map(|c| if c == '|' || c == '*' { ' ' } else { c })
            .collect();
        let cleaned = cleaned.trim();
        if cleaned.is_empty() {
            continue;
        }
        if is_ellipsis_line(cleaned) {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        }
        let tokens: Vec<&str> = cleaned.split_whitespace().collect();
        if tokens[0].eq_ignore_ascii_case("id")
            && tokens.get(1).is_some_and(|t| t.eq_ignore_ascii_case("category"))
        {
            continue;
        }
        if tokens.len() < 5 {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        }

        let Some(id) = parse_int_token::<u32>(tokens[0]) else {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        };
        let Some(category) = Role::parse_ci(tokens[1]).filter(|r| r.is_event()) else {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        };

        // A split offsets column ("1150, 1162") leaves a trailing comma.
        let mut offsets_field = tokens[2].to_owned();
        let mut word_from = 3;
        let mut row_repaired = false;
        if tokens.len() > 5
            && tokens[2].ends_with(',')
            && tokens[3].chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-')
        {
            offsets_field.push_str(tokens[3]);
            word_from = 4;
            row_repaired = true;
            push_sample(&mut diag.repairs, format!("line {line_no}: merged split offsets"));
        }

        let Some((start, end)) = parse_offsets_loose(&offsets_field) else {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        };
        let Some(head) = parse_int_token::<i64>(tokens[tokens.len() - 1]) else {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        };
        let word_tokens = &tokens[word_from..tokens.len() - 1];
        if word_tokens.is_empty() {
            diag.skipped_lines += 1;
            push_sample(&mut diag.skipped_samples, trimmed.to_owned());
            continue;
        }
        if word_tokens.len() > 1 {
            row_repaired = true;
            push_sample(&mut diag.repairs, format!("line {line_no}: joined multi-token word"));
        }
        if row_repaired {
            diag.repaired_rows += 1;
        }
        let word = word_tokens.join(" ");

        let span = if start >= 0 && end >= 0 {
            let (s, e) = (start as usize, end as usize);
            if s < e {
                Span { start: s, end: e }
            } else {
                diag.anomalous_rows += 1;
                push_sample(
                    &mut diag.anomalies,
                    format!("line {line_no}: kept reversed offsets {s},{e}"),
                );
                Span { start: s, end: e }
            }
        } else {
            diag.anomalous_rows += 1;
            push_sample(
                &mut diag.anomalies,
                format!("line {line_no}: negative offsets {start},{end} recorded as 0,0"),
            );
            Span { start: 0, end: 0 }
        };

        rows.push(PredictionRow {
            id,
            category,
            span,
            word,
            head,
        });
    }

    diag.fatal = rows.is_empty();
    (rows, diag)
}

/// A line that stands in for omitted output: dots or ellipsis glyphs only.
fn is_ellipsis_line(line: &str) -> bool {
    let has_mark = line.contains('\u{2026}')
        || line.contains('\u{22ef}')
        || line.contains('\u{22ee}')
        || line.contains("...");
    has_mark
        && line
            .chars()
            .all(|c| matches!(c, '.' | '\u{2026}' | '\u{22ef}' | '\u{22ee}' | '\u{00b7}') || c.is_whitespace())
}

/// Integer parse tolerating trailing punctuation like "17." or "8)".
fn parse_int_token<T: std::str::FromStr>(token: &str) -> Option<T> {
    let stripped = token.trim_end_matches(['.', ')', ':', ';', ',']);
    stripped.parse().ok()
}

/// Offsets parse tolerating brackets and negative numbers.
fn parse_offsets_loose(token: &str) -> Option<(i64, i64)> {
    let inner = token.trim_matches(['(', ')', '[', ']', '{', '}', '<', '>']);
    let (s, e) = inner.split_once(',')?;
    let start: i64 = s.trim().parse().ok()?;
    let end: i64 = e.trim().trim_end_matches(['.', ';']).parse().ok()?;
    Some((start, end))
}
