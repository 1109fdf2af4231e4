//! Directed labeled edges between tag occurrences that share a sentence.
//!
//! The trigger is the first verb group between the two spans (falling back
//! to the right span's leading verb group), lemmatized and looked up in a
//! trigger lexicon. The resulting label must be allowed by the ordered
//! (source type, destination type) constraint cell; the edge is flipped
//! when only the reversed pair admits the label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemma::{is_modal, is_verb_lemma, lemmatize};
use crate::linker::TagOccur;
use crate::sentences::split_sentences;
use crate::taxonomy::TagType;
use crate::tokens::{adjacent, tokenize};

const TRIGGERS_SRC: &str = include_str!("../resources/relation_triggers.lex");
const CONSTRAINTS_SRC: &str = include_str!("../resources/relation_constraints.tsv");

macro_rules! relation_labels {
    ($(($variant:ident, $code:literal)),+ $(,)?) => {
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
        )]
        pub enum RelationLabel {
            $(#[serde(rename = $code)] $variant,)+
        }

        impl RelationLabel {
            pub const ALL: &'static [RelationLabel] = &[$(RelationLabel::$variant,)+];

            pub fn code(self) -> &'static str {
                match self {
                    $(RelationLabel::$variant => $code,)+
                }
            }
        }

        impl FromStr for RelationLabel {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($code => Ok(RelationLabel::$variant),)+
                    other => Err(Error::Domain(format!("unknown relation label {other:?}"))),
                }
            }
        }
    };
}

relation_labels![
    (Allow, "ALLOW"),
    (Authorise, "AUTHORISE"),
    (Cannot, "CANNOT"),
    (Involving, "INVOLVING"),
    (Relating, "RELATING"),
    (Uses, "USES"),
    (Create, "CREATE"),
    (Increase, "INCREASE"),
    (Decreases, "DECREASES"),
    (MustEnsure, "MUST_ENSURE"),
    (Impact, "IMPACT"),
    (Manage, "MANAGE"),
    (Controlled, "CONTROLLED"),
    (Owned, "OWNED"),
    (Sell, "SELL"),
    (Buys, "BUYS"),
    (IsA, "IS_A"),
    (Precedence, "PRECEDENCE"),
    (Unclassified, "UNCLASSIFIED"),
];

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEdge {
    pub src: crate::ids::NodeId,
    pub dst: crate::ids::NodeId,
    pub label: RelationLabel,
    pub trigger: Option<String>,
    pub sentence_start: usize,
    pub sentence_end: usize,
}

/// Trigger lemma phrases plus the ordered-pair constraint table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLexicon {
    pub entries: BTreeMap<String, RelationLabel>,
    pub pair_constraints: BTreeMap<(TagType, TagType), Vec<RelationLabel>>,
}

fn normalize_trigger_phrase(phrase: &str) -> String {
    phrase.split_whitespace().map(lemmatize).collect::<Vec<_>>().join(" ")
}

impl RelationLexicon {
    /// Trigger lines `phrase => LABEL`; constraint lines `SRC DST L1|L2…`.
    pub fn parse(triggers_src: &str, constraints_src: &str) -> Result<RelationLexicon> {
        let mut entries = BTreeMap::new();
        for (idx, line) in triggers_src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (phrase, label) = line
                .split_once("=>")
                .ok_or_else(|| Error::format(idx + 1, "trigger entry must be: phrase => LABEL"))?;
            let label: RelationLabel = label.trim().parse()?;
            if label == RelationLabel::Unclassified {
                return Err(Error::format(
                    idx + 1,
                    "UNCLASSIFIED is the no-match value and cannot be a trigger target",
                ));
            }
            let key = normalize_trigger_phrase(phrase);
            if key.is_empty() {
                return Err(Error::format(idx + 1, "trigger entry has an empty phrase"));
            }
            entries.insert(key, label);
        }
        let mut pair_constraints: BTreeMap<(TagType, TagType), Vec<RelationLabel>> =
            BTreeMap::new();
        for (idx, line) in constraints_src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(src), Some(dst), Some(labels)) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::format(idx + 1, "constraint row must be: SRC DST LABELS"));
            };
            let src: TagType = src.parse()?;
            let dst: TagType = dst.parse()?;
            if src == dst {
                return Err(Error::format(idx + 1, "diagonal pairs are not constrained"));
            }
            let labels = labels
                .split('|')
                .map(|l| l.parse::<RelationLabel>())
                .collect::<Result<Vec<_>>>()?;
            if pair_constraints.insert((src, dst), labels).is_some() {
                return Err(Error::format(idx + 1, format!("duplicate pair {src} {dst}")));
            }
        }
        for src in TagType::ALL {
            for dst in TagType::ALL {
                if src != dst && !pair_constraints.contains_key(&(src, dst)) {
                    return Err(Error::Invalid(format!(
                        "constraint table is missing the pair {src} {dst}"
                    )));
                }
            }
        }
        Ok(RelationLexicon { entries, pair_constraints })
    }

    pub fn builtin() -> RelationLexicon {
        RelationLexicon::parse(TRIGGERS_SRC, CONSTRAINTS_SRC)
            .expect("shipped relation lexicon must parse")
    }

    /// Longest-prefix lookup of a trigger lemma phrase, then each single
    /// token left to right. "cannot conduct" resolves through "cannot".
    pub fn lookup(&self, trigger: &str) -> Option<RelationLabel> {
        let words: Vec<&str> = trigger.split_whitespace().collect();
        for take in (1..=words.len()).rev() {
            if let Some(label) = self.entries.get(&words[..take].join(" ")) {
                return Some(*label);
            }
        }
        for word in &words[1..] {
            if let Some(label) = self.entries.get(*word) {
                return Some(*label);
            }
        }
        None
    }

    pub fn allowed(&self, src: TagType, dst: TagType) -> &[RelationLabel] {
        self.pair_constraints.get(&(src, dst)).map_or(&[], |v| v.as_slice())
    }
}

/// Left-to-right ordered pairs of distinct occurrences; pairs whose spans
/// nest are excluded.
pub fn candidate_pairs(occurrences: &[TagOccur]) -> Vec<(&TagOccur, &TagOccur)> {
    let mut sorted: Vec<&TagOccur> = occurrences.iter().collect();
    sorted.sort_by(|a, b| {
        a.start.cmp(&b.start).then(a.end.cmp(&b.end)).then(a.occur_id.cmp(&b.occur_id))
    });
    sorted.dedup_by(|a, b| a.occur_id == b.occur_id);
    let mut pairs = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            let (a, b) = (sorted[i], sorted[j]);
            if a.start < b.start && b.end > a.end {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn verb_group(text: &str, range: (usize, usize), leading_only: bool) -> Option<String> {
    let slice = &text[range.0..range.1];
    let tokens = tokenize(slice);
    let mut group: Vec<String> = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        let lemma = lemmatize(tok.text);
        let verbish = is_verb_lemma(&lemma) || is_modal(&lemma);
        if group.is_empty() {
            if verbish {
                group.push(lemma);
            } else if leading_only {
                return None;
            }
            continue;
        }
        if !adjacent(slice, &tokens[i - 1], tok) {
            break;
        }
        let prev_modalish = group.iter().all(|g| is_modal(g) || g == "not");
        let particle = matches!(lemma.as_str(), "on" | "out" | "up" | "off");
        if (prev_modalish && (lemma == "not" || is_verb_lemma(&lemma) || is_modal(&lemma)))
            || (!prev_modalish && particle)
        {
            group.push(lemma);
        } else {
            break;
        }
    }
    (!group.is_empty()).then(|| group.join(" "))
}

/// The connective between two spans: the first verb group in the gap, or
/// the right span's leading verb group when the gap has no verb material.
pub fn extract_trigger(text: &str, left: (usize, usize), right: (usize, usize)) -> Option<String> {
    if left.1 < right.0 {
        if let Some(group) = verb_group(text, (left.1, right.0), false) {
            return Some(group);
        }
    }
    verb_group(text, right, true)
}

/// Pure constrained lookup: same-type pairs and unknown triggers are
/// UNCLASSIFIED, as is any label the pair's constraint cell forbids.
pub fn classify(
    trigger: Option<&str>,
    src_type: TagType,
    dst_type: TagType,
    lexicon: &RelationLexicon,
) -> RelationLabel {
    if src_type == dst_type {
        return RelationLabel::Unclassified;
    }
    let Some(trigger) = trigger else { return RelationLabel::Unclassified };
    let Some(label) = lexicon.lookup(trigger) else { return RelationLabel::Unclassified };
    if lexicon.allowed(src_type, dst_type).contains(&label) {
        label
    } else {
        RelationLabel::Unclassified
    }
}

/// Sentence-scoped extraction over a paragraph's enriched text. When the
/// forward pair rejects the trigger's label but the reversed pair admits
/// it, the edge direction follows the constraint table.
pub fn extract_relations(
    text: &str,
    occurrences: &[TagOccur],
    lexicon: &RelationLexicon,
) -> Vec<RelationEdge> {
    let mut edges = Vec::new();
    let mut seen: BTreeSet<(String, String, RelationLabel)> = BTreeSet::new();
    for sentence in split_sentences(text) {
        let in_sentence: Vec<TagOccur> = occurrences
            .iter()
            .filter(|o| sentence.start <= o.start && o.end <= sentence.end)
            .cloned()
            .collect();
        for (a, b) in candidate_pairs(&in_sentence) {
            let trigger = extract_trigger(text, (a.start, a.end), (b.start, b.end));
            let forward = classify(trigger.as_deref(), a.ttype, b.ttype, lexicon);
            let (src, dst, label) = if forward != RelationLabel::Unclassified {
                (a, b, forward)
            } else {
                let reversed = classify(trigger.as_deref(), b.ttype, a.ttype, lexicon);
                if reversed != RelationLabel::Unclassified {
                    (b, a, reversed)
                } else {
                    (a, b, RelationLabel::Unclassified)
                }
            };
            let key = (src.occur_id.to_string(), dst.occur_id.to_string(), label);
            if seen.insert(key) {
                edges.push(RelationEdge {
                    src: src.occur_id.clone(),
                    dst: dst.occur_id.clone(),
                    label,
                    trigger: trigger.clone(),
                    sentence_start: sentence.start,
                    sentence_end: sentence.end,
                });
            }
        }
    }
    edges
}
