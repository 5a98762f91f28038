//! Prompt construction.
//!
//! Both templates ship as fixture files compiled into the binary and are
//! checksum-pinned by tests, so any drift in their wording is caught. The
//! oracle template carries a pre-identified anchor list placeholder; the
//! end-to-end template only takes the text. Builders are pure string
//! substitution: identical inputs give identical bytes.

use thiserror::Error;

use crate::format::CandidateList;

pub const ORACLE_TEMPLATE: &str = include_str!("../../templates/oracle_prompt.txt");
pub const E2E_TEMPLATE: &str = include_str!("../../templates/e2e_prompt.txt");

const TEXT_SLOT: &str = "[INSERT TEXT HERE]";
const ANCHORS_SLOT: &str = "[INSERT ANCHOR LIST HERE (Format: ID  Offsets  Word)]";

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("oracle prompts require at least one candidate anchor")]
    EmptyCandidates,
    #[error("cannot build a prompt for an empty document")]
    EmptyText,
}

/// Classification prompt over pre-identified anchors.
///
/// The anchors block has exactly three columns (id, offsets, word), so
/// roles and heads never leak into the prompt.
pub fn build_oracle_prompt(text: &str, candidates: &CandidateList) -> Result<String, PromptError> {
    if text.is_empty() {
        return Err(PromptError::EmptyText);
    }
    if candidates.is_empty() {
        return Err(PromptError::EmptyCandidates);
    }
    let mut block = String::new();
    for (i, c) in candidates.entries().iter().enumerate() {
        if i > 0 {
            block.push('\n');
        }
        block.push_str(&format!("{}    {}    {}", c.id, c.span, c.word));
    }
    Ok(ORACLE_TEMPLATE
        .replacen(TEXT_SLOT, text, 1)
        .replacen(ANCHORS_SLOT, &block, 1))
}

/// Joint identification-and-classification prompt.
pub fn build_e2e_prompt(text: &str) -> Result<String, PromptError> {
    if text.is_empty() {
        return Err(PromptError::EmptyText);
    }
    Ok(E2E_TEMPLATE.replacen(TEXT_SLOT, text, 1))
}
