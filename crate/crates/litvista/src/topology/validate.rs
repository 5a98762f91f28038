//! Strict and relaxed graph validation.
//!
//! Strict mode admits exactly the legal edge set: Resonance heads an
//! Impulse; Pause heads an Impulse or a Resonance. Backbone
//! Impulse-to-Impulse links are ignored (neither flagged nor treated as
//! topology edges). Relaxed mode additionally accepts Resonance and Pause
//! chains (R->R, P->P); every other strict violation remains a violation.
//! Structural defects (self-loops, cycles, dangling heads, bad spans,
//! NonEvent participation) are flagged in both modes.
//!
//! Multiple roots are legal and produce an informational note, kept apart
//! from violations so that "no violations" always means "valid".

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{NarrativeGraph, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Strict,
    Relaxed,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Relaxed => "relaxed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ViolationKind {
    /// Anchor heads itself.
    SelfLoop,
    /// Head id does not exist in the graph.
    DanglingHead,
    /// Anchor participates in a head cycle (longer than a self-loop).
    CyclicHead,
    /// Span is degenerate or runs past the end of the text.
    SpanOutOfRange,
    /// Anchor word is empty or whitespace.
    EmptyWord,
    /// NonEvent anchor has a head.
    NonEventWithHead,
    /// Some anchor's head is a NonEvent.
    NonEventAsHead,
    /// Impulse head is neither an Impulse nor the root.
    ImpulseHeadNotImpulse,
    /// Resonance heads a Resonance (chain; strict only).
    ResonanceHeadResonance,
    /// Resonance heads a Pause (illegal in both modes).
    ResonanceHeadPause,
    /// Pause heads a Pause (chain; strict only).
    PauseHeadPause,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Id of the anchor the violation is attached to.
    pub anchor: u32,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "anchor {}: {} ({})", self.anchor, self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub mode: Mode,
    pub violations: Vec<Violation>,
    /// Informational observations that do not affect validity.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates a graph under the given mode. Never panics on defective input.
pub fn validate(graph: &NarrativeGraph, mode: Mode) -> ValidationReport {
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let anchors = graph.anchors();

    for a in anchors {
        if a.span.start >= a.span.end || a.span.end > graph.char_len() {
            violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::SpanOutOfRange,
                detail: format!("span {} over text of {} chars", a.span, graph.char_len()),
            });
        }
        if a.word.trim().is_empty() {
            violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::EmptyWord,
                detail: "anchor word is empty".to_owned(),
            });
        }
        match a.head {
            Some(h) if h == a.id => violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::SelfLoop,
                detail: format!("head equals own id {h}"),
            }),
            Some(h) if graph.anchor(h).is_none() => violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::DanglingHead,
                detail: format!("head {h} does not exist"),
            }),
            _ => {}
        }
    }

    for id in cycle_members(graph) {
        violations.push(Violation {
            anchor: id,
            kind: ViolationKind::CyclicHead,
            detail: "anchor lies on a head cycle".to_owned(),
        });
    }

    for a in anchors {
        let Some(h) = a.head else { continue };
        if h == a.id {
            continue;
        }
        let Some(head) = graph.anchor(h) else { continue };
        if a.role == Role::NonEvent {
            violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::NonEventWithHead,
                detail: format!("NonEvent anchor heads {h}"),
            });
            continue;
        }
        if head.role == Role::NonEvent {
            violations.push(Violation {
                anchor: a.id,
                kind: ViolationKind::NonEventAsHead,
                detail: format!("head {h} is a NonEvent"),
            });
            continue;
        }
        let kind = match (a.role, head.role) {
            (Role::Impulse, Role::Impulse) => None,
            (Role::Impulse, _) => Some(ViolationKind::ImpulseHeadNotImpulse),
            (Role::Resonance, Role::Impulse) => None,
            (Role::Resonance, Role::Resonance) if mode == Mode::Strict => {
                Some(ViolationKind::ResonanceHeadResonance)
            }
            (Role::Resonance, Role::Resonance) => None,
            (Role::Resonance, Role::Pause) => Some(ViolationKind::ResonanceHeadPause),
            (Role::Pause, Role::Impulse) | (Role::Pause, Role::Resonance) => None,
            (Role::Pause, Role::Pause) if mode == Mode::Strict => {
                Some(ViolationKind::PauseHeadPause)
            }
            (Role::Pause, Role::Pause) => None,
            (Role::NonEvent, _) | (_, Role::NonEvent) => unreachable!("handled above"),
        };
        if let Some(kind) = kind {
            violations.push(Violation {
                anchor: a.id,
                kind,
                detail: format!("{} {} heads {} {}", a.role, a.id, head.role, h),
            });
        }
    }

    let roots: Vec<u32> = anchors
        .iter()
        .filter(|a| a.role.is_event() && a.head.is_none())
        .map(|a| a.id)
        .collect();
    if roots.len() > 1 {
        notes.push(format!(
            "multiple root anchors: {}",
            roots
                .iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }

    violations.sort_by_key(|v| (v.anchor, v.kind));
    ValidationReport {
        mode,
        violations,
        notes,
    }
}

/// Ids of anchors lying on head cycles of length two or more.
fn cycle_members(graph: &NarrativeGraph) -> Vec<u32> {
    // 0 = unvisited, 1 = on the current path, 2 = finished.
    let mut state: HashMap<u32, u8> = HashMap::new();
    let mut members = Vec::new();
    for start in graph.anchors() {
        if state.get(&start.id).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start.id);
        while let Some(id) = cur {
            match state.get(&id).copied().unwrap_or(0) {
                1 => {
                    // Found a cycle: everything on the path from `id` onward.
                    let pos = path.iter().position(|&p| p == id).unwrap();
                    for &m in &path[pos..] {
                        if graph.anchor(m).and_then(|a| a.head) != Some(m) {
                            members.push(m);
                        }
                    }
                    break;
                }
                2 => break,
                _ => {}
            }
            state.insert(id, 1);
            path.push(id);
            cur = graph
                .anchor(id)
                .and_then(|a| a.head)
                .filter(|h| graph.anchor(*h).is_some() && *h != id);
        }
        for id in path {
            state.insert(id, 2);
        }
    }
    members.sort_unstable();
    members
}
