//! Graph types for narrative topologies.
//!
//! Anchors carry a half-open character span into the document text, a role,
//! and an optional head reference. Construction is deliberately lenient:
//! only duplicate ids are rejected, because they make head references
//! ambiguous. Everything else (self-loops, cycles, dangling heads, bad
//! spans, illegal role pairs) is *reported* by [`validate`] rather than
//! thrown, so defective inputs can be inspected instead of crashing the
//! pipeline.

mod coords;
mod validate;

pub use coords::{backbone, cross_dependency_count, vista_coordinates, CrossDef, VistaPoint};
pub use validate::{validate, Mode, ValidationReport, Violation, ViolationKind};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Topological role of an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Backbone event: advances the narrative progress index.
    Impulse,
    /// Lateral expansion of the current stage.
    Resonance,
    /// Vertical dive: freezes the index to add depth to one moment.
    Pause,
    /// Residual annotation; excluded from the topology.
    NonEvent,
}

impl Role {
    /// The three roles that participate in the topology.
    pub fn is_event(self) -> bool {
        self != Role::NonEvent
    }

    /// Canonical spelling used by the file formats.
    pub fn name(self) -> &'static str {
        match self {
            Role::Impulse => "Impulse",
            Role::Resonance => "Resonance",
            Role::Pause => "Pause",
            Role::NonEvent => "NonEvent",
        }
    }

    /// Case-insensitive parse of a role name.
    pub fn parse_ci(s: &str) -> Option<Role> {
        let t = s.trim();
        for role in [Role::Impulse, Role::Resonance, Role::Pause, Role::NonEvent] {
            if t.eq_ignore_ascii_case(role.name()) {
                return Some(role);
            }
        }
        None
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Effect of a role on the narrative progress index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    /// Impulse: the index advances by one.
    Advance,
    /// Resonance: the index dwells; movement is lateral (a fractional step).
    Dwell,
    /// Pause: the index holds still.
    Hold,
    /// NonEvent: no transition; the anchor is outside the topology.
    Excluded,
}

/// Maps a role onto its index transition.
pub fn role_transition(role: Role) -> TransitionKind {
    match role {
        Role::Impulse => TransitionKind::Advance,
        Role::Resonance => TransitionKind::Dwell,
        Role::Pause => TransitionKind::Hold,
        Role::NonEvent => TransitionKind::Excluded,
    }
}

/// Half-open character span `[start, end)` into a document text.
///
/// Offsets count Unicode scalar values, not bytes. Graph-domain spans are
/// non-empty (`start < end`); use [`Span::new`] to enforce that. The fields
/// stay public because tolerant parsing keeps degenerate spans from raw
/// model output verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// A validated non-empty span.
    pub fn new(start: usize, end: usize) -> Result<Span, GraphError> {
        if start < end {
            Ok(Span { start, end })
        } else {
            Err(GraphError::EmptySpan { start, end })
        }
    }

    /// Length in characters; zero for degenerate spans.
    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.start, self.end)
    }
}

/// A classified anchor token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub id: u32,
    pub span: Span,
    pub word: String,
    pub role: Role,
    /// Head anchor id; `None` is the root (spelled `-1` in file formats).
    pub head: Option<u32>,
}

/// Fractional lateral step assigned to Resonance anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaConfig {
    delta: f64,
}

impl DeltaConfig {
    /// Requires `0 < delta < 1`.
    pub fn new(delta: f64) -> Result<DeltaConfig, GraphError> {
        if delta > 0.0 && delta < 1.0 {
            Ok(DeltaConfig { delta })
        } else {
            Err(GraphError::InvalidDelta(delta))
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig { delta: 0.5 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("empty span: start {start} is not below end {end}")]
    EmptySpan { start: usize, end: usize },
    #[error("duplicate anchor id {0}")]
    DuplicateAnchorId(u32),
    #[error("delta must lie strictly between 0 and 1, got {0}")]
    InvalidDelta(f64),
}

/// Errors from topology operations that require a relaxed-valid graph.
#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("graph '{doc_id}' failed relaxed validation with {} violation(s), first: {first}", report.violations.len())]
    InvalidGraph {
        doc_id: String,
        report: ValidationReport,
        first: String,
    },
}

impl TopologyError {
    pub(crate) fn invalid(graph: &NarrativeGraph, report: ValidationReport) -> TopologyError {
        let first = report
            .violations
            .first()
            .map(|v| v.to_string())
            .unwrap_or_default();
        TopologyError::InvalidGraph {
            doc_id: graph.doc_id().to_owned(),
            report,
            first,
        }
    }
}

/// A document with its classified anchors, ordered by span start.
#[derive(Debug, Clone, PartialEq)]
pub struct NarrativeGraph {
    doc_id: String,
    text: String,
    anchors: Vec<Anchor>,
    index: HashMap<u32, usize>,
    char_starts: Vec<usize>,
}

impl NarrativeGraph {
    /// Builds a graph, sorting anchors by `(span.start, span.end, id)`.
    ///
    /// Rejects duplicate ids; all other defects are left for [`validate`].
    pub fn new(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        mut anchors: Vec<Anchor>,
    ) -> Result<NarrativeGraph, GraphError> {
        let text = text.into();
        anchors.sort_by_key(|a| (a.span.start, a.span.end, a.id));
        let mut index = HashMap::with_capacity(anchors.len());
        for (pos, a) in anchors.iter().enumerate() {
            if index.insert(a.id, pos).is_some() {
                return Err(GraphError::DuplicateAnchorId(a.id));
            }
        }
        let char_starts = text.char_indices().map(|(b, _)| b).collect();
        Ok(NarrativeGraph {
            doc_id: doc_id.into(),
            text,
            anchors,
            index,
            char_starts,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Anchors in ascending span order.
    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn anchor(&self, id: u32) -> Option<&Anchor> {
        self.index.get(&id).map(|&pos| &self.anchors[pos])
    }

    /// Document length in characters.
    pub fn char_len(&self) -> usize {
        self.char_starts.len()
    }

    /// Extracts the text under a character span; `None` when out of range.
    pub fn slice(&self, span: Span) -> Option<&str> {
        slice_chars(&self.text, &self.char_starts, span)
    }

    /// The head anchor of `id`, when present and resolvable.
    pub fn head_of(&self, id: u32) -> Option<&Anchor> {
        self.anchor(id).and_then(|a| a.head).and_then(|h| self.anchor(h))
    }
}

/// Char-offset slicing over a precomputed char-to-byte table.
pub(crate) fn slice_chars<'t>(text: &'t str, char_starts: &[usize], span: Span) -> Option<&'t str> {
    if span.start > span.end || span.end > char_starts.len() {
        return None;
    }
    let byte_start = if span.start == char_starts.len() {
        text.len()
    } else {
        char_starts[span.start]
    };
    let byte_end = if span.end == char_starts.len() {
        text.len()
    } else {
        char_starts[span.end]
    };
    Some(&text[byte_start..byte_end])
}
