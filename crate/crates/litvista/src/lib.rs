//! Narrative topology toolkit.
//!
//! A narrative is modeled as a graph of *anchors* (event-bearing tokens)
//! classified into three topological roles: Impulse anchors advance the
//! narrative progress index and form the backbone, Resonance anchors expand a
//! stage laterally, and Pause anchors freeze it to add depth. A residual
//! NonEvent role exists in gold data but takes no part in the topology.
//!
//! The crate covers the full working loop around that model:
//!
//! * [`topology`] - graph types, strict/relaxed validation, backbone
//!   numbering, 3-D coordinates, and cross-dependency statistics;
//! * [`format`] - the five-column prediction table, candidate lists, the
//!   tolerant reader for raw model output, inline tagged text, canonical
//!   graph JSON, and dataset loading;
//! * [`scoring`] - span/role anchor matching, dependency matching, and the
//!   harmonic summary metric;
//! * [`runner`] - prompt assembly, cached model execution with retries, a
//!   deterministic local baseline, and end-to-end evaluation runs;
//! * [`analysis`] - corpus statistics, head-distance histograms, the lexical
//!   role space, story-shape exports, and deterministic SVG rendering.

pub mod analysis;
pub mod format;
pub mod runner;
pub mod scoring;
pub mod topology;
