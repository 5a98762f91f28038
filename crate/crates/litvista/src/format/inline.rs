//! Inline tagged text.
//!
//! Each anchor token is wrapped in a role tag: `<Impulse>ran</Impulse>`.
//! Inside a tag an Impulse may register an index by appending `@n` to the
//! token; a Resonance or Pause may append `#n` to head the most recent
//! preceding Impulse registered under `n`. Indices may be re-registered
//! later in the document, so `#n` always resolves positionally to the
//! nearest preceding binding. Index-free anchors fall back to recency: an
//! Impulse heads the previous Impulse (or the root), a Resonance heads the
//! nearest preceding Impulse or Resonance, and a Pause heads the nearest
//! preceding event anchor of any role.
//!
//! Stripping tags and markers yields the plain text byte-for-byte; anchor
//! spans index that plain text in characters. Parsed graphs are always
//! relaxed-valid by construction, because the grammar can only express
//! edges of the relaxed edge set.
//!
//! [`TagMap`] maps custom tag spellings onto roles so externally produced
//! markup can be ingested; serialization always emits the standard role
//! names.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::topology::{
    validate, Anchor, GraphError, Mode, NarrativeGraph, Role, Span,
};

/// Maps tag spellings (the text between `<` and `>`) onto roles.
#[derive(Debug, Clone)]
pub struct TagMap {
    names: BTreeMap<String, Role>,
}

impl TagMap {
    /// The four standard role names.
    pub fn standard() -> TagMap {
        let mut names = BTreeMap::new();
        for role in [Role::Impulse, Role::Resonance, Role::Pause, Role::NonEvent] {
            names.insert(role.name().to_owned(), role);
        }
        TagMap { names }
    }

    /// Registers an extra spelling, e.g. `span style="color:red"`.
    pub fn alias(mut self, spelling: impl Into<String>, role: Role) -> TagMap {
        self.names.insert(spelling.into(), role);
        self
    }

    fn resolve(&self, inner: &str) -> Option<Role> {
        self.names.get(inner).copied()
    }

    /// Whether a close-tag body matches an open tag spelling.
    fn closes(&self, body: &str, open_name: &str) -> bool {
        body.is_empty()
            || body == open_name
            || Some(body) == open_name.split_whitespace().next()
    }
}

impl Default for TagMap {
    fn default() -> Self {
        TagMap::standard()
    }
}

/// How many explicit `#` indices serialization emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexPolicy {
    /// Index every dependent whose head is an Impulse.
    All,
    /// Index only where the recency fallback would mis-attach.
    Minimal,
}

#[derive(Debug, Error, PartialEq)]
pub enum InlineError {
    #[error("char {pos}: malformed tag: {reason}")]
    MalformedTag { pos: usize, reason: String },
    #[error("char {pos}: index #{index} has no preceding @{index} Impulse")]
    UnknownIndex { pos: usize, index: u32 },
    #[error("graph '{doc_id}' failed relaxed validation with {violations} violation(s)")]
    InvalidGraph { doc_id: String, violations: usize },
    #[error("anchors {first} and {second} have overlapping spans")]
    OverlappingSpans { first: u32, second: u32 },
    #[error("anchor {anchor}: span does not cover a whole token")]
    SpanNotOnToken { anchor: u32 },
    #[error("anchor {anchor}: head not expressible by the inline grammar: {reason}")]
    UnrepresentableHead { anchor: u32, reason: String },
    #[error("anchor {anchor}: token would not survive a round-trip: {reason}")]
    UnencodableToken { anchor: u32, reason: String },
    #[error("char {pos}: plain text contains tag-like markup")]
    UnencodableText { pos: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MarkerKind {
    Register, // @n on an Impulse
    HeadRef,  // #n on a Resonance or Pause
}

struct RawAnchor {
    role: Role,
    span: Span,
    word: String,
    marker: Option<(MarkerKind, u32)>,
    /// Char position of the opening `<` in the tagged input, for errors.
    pos: usize,
}

struct OpenTag {
    role: Role,
    name: String,
    start_plain: usize,
    content: String,
    pos: usize,
}

/// Parses tagged text into a graph. Ids are assigned 0..n in text order.
pub fn parse_inline(
    tagged: &str,
    doc_id: &str,
    tags: &TagMap,
) -> Result<NarrativeGraph, InlineError> {
    let chars: Vec<char> = tagged.chars().collect();
    let mut plain = String::new();
    let mut plain_len = 0usize;
    let mut raw: Vec<RawAnchor> = Vec::new();
    let mut open: Option<OpenTag> = None;
    let mut i = 0usize;

    while i < chars.len() {
        if chars[i] == '<' {
            if let Some((inner, after)) = read_tag_body(&chars, i) {
                if let Some(body) = inner.strip_prefix('/') {
                    match open.take() {
                        Some(tag) if tags.closes(body, &tag.name) => {
                            raw.push(finish_anchor(tag, &mut plain, &mut plain_len)?);
                            i = after;
                            continue;
                        }
                        Some(tag) => {
                            if tags.resolve(body).is_some() || body.is_empty() {
                                return Err(InlineError::MalformedTag {
                                    pos: i,
                                    reason: format!(
                                        "close tag '{inner}' does not match open tag '{}'",
                                        tag.name
                                    ),
                                });
                            }
                            open = Some(tag); // literal text after all
                        }
                        None => {
                            if tags.resolve(body).is_some() || body.is_empty() {
                                return Err(InlineError::MalformedTag {
                                    pos: i,
                                    reason: format!("close tag '{inner}' without an open tag"),
                                });
                            }
                        }
                    }
                } else if let Some(role) = tags.resolve(&inner) {
                    if let Some(tag) = &open {
                        return Err(InlineError::MalformedTag {
                            pos: i,
                            reason: format!("tag '{inner}' opened inside tag '{}'", tag.name),
                        });
                    }
                    open = Some(OpenTag {
                        role,
                        name: inner,
                        start_plain: plain_len,
                        content: String::new(),
                        pos: i,
                    });
                    i = after;
                    continue;
                }
            }
        }
        // Literal character.
        match &mut open {
            Some(tag) => tag.content.push(chars[i]),
            None => {
                plain.push(chars[i]);
                plain_len += 1;
            }
        }
        i += 1;
    }
    if let Some(tag) = open {
        return Err(InlineError::MalformedTag {
            pos: tag.pos,
            reason: format!("tag '{}' never closed", tag.name),
        });
    }

    let anchors = resolve_heads(&raw)?;
    Ok(NarrativeGraph::new(doc_id, plain, anchors)?)
}

/// Reads `<...>` starting at `at`; `None` if no well-formed body follows.
fn read_tag_body(chars: &[char], at: usize) -> Option<(String, usize)> {
    const MAX_TAG: usize = 64;
    let mut j = at + 1;
    while j < chars.len() && j - at <= MAX_TAG {
        match chars[j] {
            '>' => {
                let inner: String = chars[at + 1..j].iter().collect();
                return Some((inner, j + 1));
            }
            '<' => return None,
            _ => j += 1,
        }
    }
    None
}

fn finish_anchor(
    tag: OpenTag,
    plain: &mut String,
    plain_len: &mut usize,
) -> Result<RawAnchor, InlineError> {
    let (word, marker) = split_marker(&tag.content);
    if word.is_empty() {
        return Err(InlineError::MalformedTag {
            pos: tag.pos,
            reason: "empty anchor token".to_owned(),
        });
    }
    if let Some((kind, _)) = marker {
        let legal = match (kind, tag.role) {
            (MarkerKind::Register, Role::Impulse) => true,
            (MarkerKind::HeadRef, Role::Resonance | Role::Pause) => true,
            _ => false,
        };
        if !legal {
            return Err(InlineError::MalformedTag {
                pos: tag.pos,
                reason: format!(
                    "marker {} is not allowed on a {} anchor",
                    match kind {
                        MarkerKind::Register => "@",
                        MarkerKind::HeadRef => "#",
                    },
                    tag.role
                ),
            });
        }
    }
    let word_chars = word.chars().count();
    plain.push_str(&word);
    *plain_len += word_chars;
    Ok(RawAnchor {
        role: tag.role,
        span: Span {
            start: tag.start_plain,
            end: tag.start_plain + word_chars,
        },
        word,
        marker,
        pos: tag.pos,
    })
}

/// Splits `word@n` / `word#n` into the word and its marker.
///
/// The marker is the last `@` or `#` whose suffix is all digits. Appending
/// a marker is therefore always reversible, whatever the word looks like.
fn split_marker(content: &str) -> (String, Option<(MarkerKind, u32)>) {
    let chars: Vec<char> = content.chars().collect();
    for k in (0..chars.len()).rev() {
        let kind = match chars[k] {
            '@' => MarkerKind::Register,
            '#' => MarkerKind::HeadRef,
            _ => continue,
        };
        let digits: String = chars[k + 1..].iter().collect();
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(n) = digits.parse::<u32>() {
                return (chars[..k].iter().collect(), Some((kind, n)));
            }
        }
        // The trailing run is not a marker; nothing earlier can end in
        // digits at the content's end either.
        break;
    }
    (content.to_owned(), None)
}

/// Second pass: ids in text order, heads via indices and recency.
fn resolve_heads(raw: &[RawAnchor]) -> Result<Vec<Anchor>, InlineError> {
    let mut registry: HashMap<u32, u32> = HashMap::new();
    let mut prev_impulse: Option<u32> = None;
    let mut prev_impulse_or_resonance: Option<u32> = None;
    let mut prev_event: Option<u32> = None;
    let mut anchors = Vec::with_capacity(raw.len());

    for (idx, r) in raw.iter().enumerate() {
        let id = idx as u32;
        let head = match r.role {
            Role::Impulse => prev_impulse,
            Role::Resonance => match r.marker {
                Some((MarkerKind::HeadRef, n)) => Some(lookup(&registry, n, r.pos)?),
                _ => prev_impulse_or_resonance,
            },
            Role::Pause => match r.marker {
                Some((MarkerKind::HeadRef, n)) => Some(lookup(&registry, n, r.pos)?),
                _ => prev_event,
            },
            Role::NonEvent => None,
        };
        anchors.push(Anchor {
            id,
            span: r.span,
            word: r.word.clone(),
            role: r.role,
            head,
        });
        match r.role {
            Role::Impulse => {
                if let Some((MarkerKind::Register, n)) = r.marker {
                    registry.insert(n, id); // later bindings shadow earlier
                }
                prev_impulse = Some(id);
                prev_impulse_or_resonance = Some(id);
                prev_event = Some(id);
            }
            Role::Resonance => {
                prev_impulse_or_resonance = Some(id);
                prev_event = Some(id);
            }
            Role::Pause => {
                prev_event = Some(id);
            }
            Role::NonEvent => {}
        }
    }
    Ok(anchors)
}

fn lookup(registry: &HashMap<u32, u32>, n: u32, pos: usize) -> Result<u32, InlineError> {
    registry
        .get(&n)
        .copied()
        .ok_or(InlineError::UnknownIndex { pos, index: n })
}

/// Serializes a relaxed-valid graph back into tagged text.
pub fn serialize_inline(
    graph: &NarrativeGraph,
    policy: IndexPolicy,
    tags: &TagMap,
) -> Result<String, InlineError> {
    let report = validate(graph, Mode::Relaxed);
    if !report.is_valid() {
        return Err(InlineError::InvalidGraph {
            doc_id: graph.doc_id().to_owned(),
            violations: report.violations.len(),
        });
    }
    let anchors = graph.anchors();
    for pair in anchors.windows(2) {
        if pair[0].span.end > pair[1].span.start {
            return Err(InlineError::OverlappingSpans {
                first: pair[0].id,
                second: pair[1].id,
            });
        }
    }
    let text_chars: Vec<char> = graph.text().chars().collect();
    if let Some(pos) = find_tag_pattern(&text_chars, tags) {
        return Err(InlineError::UnencodableText { pos });
    }
    for a in anchors {
        let before_ok = a.span.start == 0 || !text_chars[a.span.start - 1].is_alphanumeric();
        let after_ok =
            a.span.end == text_chars.len() || !text_chars[a.span.end].is_alphanumeric();
        if !before_ok || !after_ok {
            return Err(InlineError::SpanNotOnToken { anchor: a.id });
        }
    }

    let tau: HashMap<u32, u32> = anchors
        .iter()
        .filter(|a| a.role == Role::Impulse)
        .enumerate()
        .map(|(i, a)| (a.id, i as u32 + 1))
        .collect();

    // Recency simulation mirrors resolve_heads.
    let mut prev_impulse: Option<u32> = None;
    let mut prev_impulse_or_resonance: Option<u32> = None;
    let mut prev_event: Option<u32> = None;
    let mut markers: HashMap<u32, String> = HashMap::new();
    let mut referenced: Vec<u32> = Vec::new();

    for a in anchors {
        let recency = match a.role {
            Role::Impulse => prev_impulse,
            Role::Resonance => prev_impulse_or_resonance,
            Role::Pause => prev_event,
            Role::NonEvent => None,
        };
        match a.role {
            Role::Impulse => {
                if a.head != recency {
                    return Err(InlineError::UnrepresentableHead {
                        anchor: a.id,
                        reason: format!(
                            "an Impulse can only head the previous Impulse ({:?}), not {:?}",
                            recency, a.head
                        ),
                    });
                }
            }
            Role::Resonance | Role::Pause => match a.head {
                Some(h) => {
                    let head = graph.anchor(h).expect("validated");
                    if head.role == Role::Impulse {
                        if head.span.start >= a.span.start {
                            return Err(InlineError::UnrepresentableHead {
                                anchor: a.id,
                                reason: format!("head {h} does not precede the anchor"),
                            });
                        }
                        let needed = policy == IndexPolicy::All || recency != Some(h);
                        if needed {
                            markers.insert(a.id, format!("#{}", tau[&h]));
                            referenced.push(h);
                        }
                    } else if recency != Some(h) {
                        return Err(InlineError::UnrepresentableHead {
                            anchor: a.id,
                            reason: format!(
                                "chain head {h} is not the recency target {recency:?}"
                            ),
                        });
                    }
                }
                None => {
                    if recency.is_some() {
                        return Err(InlineError::UnrepresentableHead {
                            anchor: a.id,
                            reason: format!(
                                "root attachment, but recency would resolve to {recency:?}"
                            ),
                        });
                    }
                }
            },
            Role::NonEvent => {}
        }
        match a.role {
            Role::Impulse => {
                prev_impulse = Some(a.id);
                prev_impulse_or_resonance = Some(a.id);
                prev_event = Some(a.id);
            }
            Role::Resonance => {
                prev_impulse_or_resonance = Some(a.id);
                prev_event = Some(a.id);
            }
            Role::Pause => {
                prev_event = Some(a.id);
            }
            Role::NonEvent => {}
        }
    }

    for a in anchors {
        if a.role == Role::Impulse {
            let register = policy == IndexPolicy::All || referenced.contains(&a.id);
            if register {
                markers.insert(a.id, format!("@{}", tau[&a.id]));
            }
        }
    }

    // Tokens without a marker must not end in a marker pattern themselves.
    for a in anchors {
        if markers.contains_key(&a.id) {
            continue;
        }
        let slice = graph.slice(a.span).expect("validated span");
        if split_marker(slice).1.is_some() {
            return Err(InlineError::UnencodableToken {
                anchor: a.id,
                reason: "token ends in an index-marker pattern".to_owned(),
            });
        }
    }

    let mut out = String::new();
    let mut cursor = 0usize;
    for a in anchors {
        let gap = Span {
            start: cursor,
            end: a.span.start,
        };
        out.push_str(graph.slice(gap).expect("ordered spans"));
        out.push('<');
        out.push_str(a.role.name());
        out.push('>');
        out.push_str(graph.slice(a.span).expect("validated span"));
        if let Some(m) = markers.get(&a.id) {
            out.push_str(m);
        }
        out.push_str("</");
        out.push_str(a.role.name());
        out.push('>');
        cursor = a.span.end;
    }
    let tail = Span {
        start: cursor,
        end: graph.char_len(),
    };
    out.push_str(graph.slice(tail).expect("tail slice"));
    Ok(out)
}

/// First char position where a resolvable tag or close tag opens, if any.
fn find_tag_pattern(chars: &[char], tags: &TagMap) -> Option<usize> {
    for (i, &c) in chars.iter().enumerate() {
        if c != '<' {
            continue;
        }
        if let Some((inner, _)) = read_tag_body(chars, i) {
            if let Some(body) = inner.strip_prefix('/') {
                if body.is_empty() || tags.resolve(body).is_some() {
                    return Some(i);
                }
            } else if tags.resolve(&inner).is_some() {
                return Some(i);
            }
        }
    }
    None
}
