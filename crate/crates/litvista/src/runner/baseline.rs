//! Deterministic lexical-prior baseline.
//!
//! Roles come from a word's majority role in a training lexicon when one
//! is supplied, and default to Resonance, the majority class, otherwise.
//! Heads follow the recency rules: an Impulse heads the previous Impulse,
//! everything else heads the most recent Impulse, and −1 stands in when
//! none exists yet. Without a candidate list (the end-to-end setting) the
//! baseline emits nothing: anchor identification is out of its scope.

use std::collections::HashMap;

use crate::analysis::LexicalRoleStats;
use crate::format::{CandidateList, PredictionRow};
use crate::topology::Role;

pub fn heuristic_baseline(
    _doc_text: &str,
    candidates: Option<&CandidateList>,
    lexicon: Option<&[LexicalRoleStats]>,
) -> Vec<PredictionRow> {
    let Some(candidates) = candidates else {
        return Vec::new();
    };
    let by_word: HashMap<&str, Role> = lexicon
        .unwrap_or(&[])
        .iter()
        .map(|stats| (stats.word.as_str(), stats.majority_role()))
        .collect();

    let mut rows = Vec::with_capacity(candidates.len());
    let mut last_impulse: Option<u32> = None;
    for c in candidates.entries() {
        let role = by_word
            .get(c.word.to_lowercase().as_str())
            .copied()
            .unwrap_or(Role::Resonance);
        // Before the update below, `last_impulse` is the previous Impulse
        // for Impulse rows and the most recent one for everything else:
        // the two head rules collapse to the same recency value here.
        let head = last_impulse;
        rows.push(PredictionRow {
            id: c.id,
            category: role,
            span: c.span,
            word: c.word.clone(),
            head: head.map_or(-1, i64::from),
        });
        if role == Role::Impulse {
            last_impulse = Some(c.id);
        }
    }
    rows
}
