//! Backbone numbering, 3-D coordinates, and cross-dependency statistics.
//!
//! Coordinates place every event anchor in a 3-D narrative space. The x
//! axis is the integer progress index tau of the governing Impulse (the
//! nearest Impulse ancestor; 0 from the root), assigned 1..k over Impulses
//! in ascending span order. A Resonance sits at y = delta times the number
//! of Pause anchors in its dependent subtree; a Pause inherits y from a
//! direct Resonance parent and carries the unit z amplitude. NonEvent
//! anchors are excluded.

use std::collections::HashMap;

use serde::Serialize;

use super::{validate, DeltaConfig, Mode, NarrativeGraph, Role, TopologyError};

/// One event anchor placed in the narrative space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VistaPoint {
    pub anchor: u32,
    /// Progress index of the governing Impulse; 0 when governed by the root.
    pub x: u32,
    /// Lateral offset, a non-negative multiple of delta.
    pub y: f64,
    /// Unit vertical amplitude: 1 exactly for Pause anchors.
    pub z: u8,
}

/// Requires a relaxed-valid graph; returns the failing report otherwise.
fn require_relaxed_valid(graph: &NarrativeGraph) -> Result<(), TopologyError> {
    let report = validate(graph, Mode::Relaxed);
    if report.is_valid() {
        Ok(())
    } else {
        Err(TopologyError::invalid(graph, report))
    }
}

/// Impulse anchors paired with their progress index, in ascending span order.
///
/// Numbering is gapless 1..k regardless of how the Impulses are linked.
pub fn backbone(graph: &NarrativeGraph) -> Result<Vec<(u32, u32)>, TopologyError> {
    require_relaxed_valid(graph)?;
    Ok(graph
        .anchors()
        .iter()
        .filter(|a| a.role == Role::Impulse)
        .enumerate()
        .map(|(i, a)| (a.id, i as u32 + 1))
        .collect())
}

/// Coordinates for every event anchor, in ascending span order.
pub fn vista_coordinates(
    graph: &NarrativeGraph,
    delta: &DeltaConfig,
) -> Result<Vec<VistaPoint>, TopologyError> {
    require_relaxed_valid(graph)?;

    let tau: HashMap<u32, u32> = graph
        .anchors()
        .iter()
        .filter(|a| a.role == Role::Impulse)
        .enumerate()
        .map(|(i, a)| (a.id, i as u32 + 1))
        .collect();

    // Child lists for Pause-descendant counting.
    let mut children: HashMap<u32, Vec<u32>> = HashMap::new();
    for a in graph.anchors() {
        if let Some(h) = a.head {
            children.entry(h).or_default().push(a.id);
        }
    }

    let mut y: HashMap<u32, f64> = HashMap::new();
    for a in graph.anchors() {
        if a.role == Role::Resonance {
            let pauses = count_pause_descendants(graph, &children, a.id);
            y.insert(a.id, pauses as f64 * delta.delta());
        }
    }

    let mut points = Vec::new();
    for a in graph.anchors() {
        if !a.role.is_event() {
            continue;
        }
        let x = governing_tau(graph, &tau, a.id);
        let y = match a.role {
            Role::Impulse => 0.0,
            Role::Resonance => y[&a.id],
            Role::Pause => match graph.head_of(a.id) {
                Some(parent) if parent.role == Role::Resonance => y[&parent.id],
                _ => 0.0,
            },
            Role::NonEvent => unreachable!(),
        };
        let z = u8::from(a.role == Role::Pause);
        points.push(VistaPoint {
            anchor: a.id,
            x,
            y,
            z,
        });
    }
    Ok(points)
}

/// Progress index of the nearest Impulse on the head path (self included).
fn governing_tau(graph: &NarrativeGraph, tau: &HashMap<u32, u32>, id: u32) -> u32 {
    let mut cur = graph.anchor(id);
    while let Some(a) = cur {
        if a.role == Role::Impulse {
            return tau[&a.id];
        }
        cur = a.head.and_then(|h| graph.anchor(h));
    }
    0
}

/// Pause anchors anywhere in the dependent subtree rooted at `root`.
fn count_pause_descendants(
    graph: &NarrativeGraph,
    children: &HashMap<u32, Vec<u32>>,
    root: u32,
) -> usize {
    let mut count = 0;
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if let Some(kids) = children.get(&id) {
            for &kid in kids {
                if graph.anchor(kid).map(|a| a.role) == Some(Role::Pause) {
                    count += 1;
                }
                stack.push(kid);
            }
        }
    }
    count
}

/// What "cross dependency" means for [`cross_dependency_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossDef {
    /// Properly crossing unordered pairs of non-root edges
    /// (non-projectivity). The default corpus statistic.
    Crossing,
    /// Edges whose child and head span starts lie further apart than the
    /// threshold, in characters.
    LongRange(usize),
}

/// Counts cross dependencies under the chosen definition.
pub fn cross_dependency_count(
    graph: &NarrativeGraph,
    def: CrossDef,
) -> Result<u64, TopologyError> {
    require_relaxed_valid(graph)?;

    // Non-root edges as (child start, head start) over anchor positions.
    let edges: Vec<(usize, usize)> = graph
        .anchors()
        .iter()
        .filter_map(|a| {
            let head = graph.head_of(a.id)?;
            Some((a.span.start, head.span.start))
        })
        .collect();

    match def {
        CrossDef::Crossing => {
            let intervals: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(c, h)| (c.min(h), c.max(h)))
                .collect();
            let mut count = 0u64;
            for i in 0..intervals.len() {
                for j in i + 1..intervals.len() {
                    let (a, b) = intervals[i];
                    let (c, d) = intervals[j];
                    let crosses = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                    if crosses {
                        count += 1;
                    }
                }
            }
            Ok(count)
        }
        CrossDef::LongRange(threshold) => Ok(edges
            .iter()
            .filter(|&&(c, h)| c.abs_diff(h) > threshold)
            .count() as u64),
    }
}
