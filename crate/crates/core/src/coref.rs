//! Rule-based coreference enrichment.
//!
//! Anaphors (pronouns or short definite references) are replaced by the
//! most recent compatible noun phrase found scanning backward through the
//! current paragraph and a window of preceding paragraphs. Compatibility
//! is grammatical number; ties at the same position prefer antecedents
//! carrying a tag type listed in the rule's filter, then longer phrases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::lemma::{is_determiner, lemmatize, possible_pos, CoarsePos};
use crate::taggers::{phrase_matches, tag_glossary, TagResources};
use crate::taxonomy::TagType;
use crate::tokens::{adjacent, tokenize, Token};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorefRule {
    pub anaphor: String,
    pub antecedent_filter: Vec<TagType>,
    pub search_window: usize,
}

pub const DEFAULT_SEARCH_WINDOW: usize = 3;

/// Parse rule lines `anaphor => filter, window`. The filter is `any` or a
/// `|`-separated tag type list; the window defaults to 3 when omitted.
pub fn parse_rules(src: &str) -> Result<Vec<CorefRule>> {
    let mut rules = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (anaphor, rhs) = line.split_once("=>").ok_or_else(|| {
            Error::format(idx + 1, "coreference rule must be: anaphor => filter, window")
        })?;
        let anaphor = anaphor.trim().to_lowercase();
        if anaphor.is_empty() {
            return Err(Error::format(idx + 1, "coreference rule has an empty anaphor"));
        }
        let mut parts = rhs.split(',').map(str::trim);
        let filter_src = parts.next().unwrap_or("any");
        let antecedent_filter = if filter_src.is_empty() || filter_src == "any" || filter_src == "*"
        {
            Vec::new()
        } else {
            filter_src
                .split('|')
                .map(|t| t.trim().parse::<TagType>())
                .collect::<Result<Vec<_>>>()?
        };
        let search_window = match parts.next() {
            None | Some("") => DEFAULT_SEARCH_WINDOW,
            Some(w) => w
                .parse::<usize>()
                .map_err(|_| Error::format(idx + 1, format!("bad search window {w:?}")))?,
        };
        rules.push(CorefRule { anaphor, antecedent_filter, search_window });
    }
    Ok(rules)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    pub start: usize,
    pub end: usize,
    pub original: String,
    pub substituted: String,
}

/// The replacement list for one paragraph, in ascending non-overlapping
/// order over the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enrichment {
    pub para_id: NodeId,
    pub replacements: Vec<Replacement>,
}

impl Enrichment {
    pub fn noop(para_id: NodeId) -> Enrichment {
        Enrichment { para_id, replacements: Vec::new() }
    }

    /// Splice all replacements into `text`.
    pub fn apply(&self, text: &str) -> Result<String> {
        let mut out = String::with_capacity(text.len());
        let mut cursor = 0;
        for rep in &self.replacements {
            if rep.start < cursor || rep.end > text.len() || rep.start > rep.end {
                return Err(Error::Integrity(format!(
                    "replacement {}..{} overlaps or exceeds text of length {}",
                    rep.start,
                    rep.end,
                    text.len()
                )));
            }
            if text[rep.start..rep.end] != *rep.original {
                return Err(Error::Integrity(format!(
                    "replacement original {:?} does not match text slice {:?}",
                    rep.original,
                    &text[rep.start..rep.end]
                )));
            }
            out.push_str(&text[cursor..rep.start]);
            out.push_str(&rep.substituted);
            cursor = rep.end;
        }
        out.push_str(&text[cursor..]);
        Ok(out)
    }

    /// Map a span over the enriched text back to original-text offsets.
    /// Returns `None` when the span touches a substituted region.
    pub fn map_to_original(&self, start: usize, end: usize) -> Option<(usize, usize)> {
        let mut shift: isize = 0;
        for rep in &self.replacements {
            let sub_start = (rep.start as isize + shift) as usize;
            let sub_end = sub_start + rep.substituted.len();
            if start < sub_end && sub_start < end {
                return None;
            }
            if sub_start >= end {
                break;
            }
            shift += rep.substituted.len() as isize - (rep.end - rep.start) as isize;
        }
        let mut shift: isize = 0;
        for rep in &self.replacements {
            let sub_start = (rep.start as isize + shift) as usize;
            if sub_start + rep.substituted.len() <= start {
                shift += rep.substituted.len() as isize - (rep.end - rep.start) as isize;
            } else {
                break;
            }
        }
        Some(((start as isize - shift) as usize, (end as isize - shift) as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Number {
    Singular,
    Plural,
}

fn token_number(token: &str) -> Number {
    let lower = token.to_lowercase();
    if matches!(lower.as_str(), "people" | "children" | "men" | "women" | "persons") {
        return Number::Plural;
    }
    if lower.ends_with('s') && lemmatize(&lower) != lower {
        Number::Plural
    } else {
        Number::Singular
    }
}

fn anaphor_number(anaphor: &str) -> Number {
    let last = anaphor.split_whitespace().last().unwrap_or(anaphor);
    match last {
        "they" | "them" | "their" | "theirs" | "these" | "those" => Number::Plural,
        "it" | "its" | "this" | "that" | "he" | "she" | "him" | "her" => Number::Singular,
        other => token_number(other),
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    start: usize,
    end: usize,
    ttype: Option<TagType>,
    number: Number,
}

fn is_closed_class(token: &str) -> bool {
    matches!(
        possible_pos(token).as_slice(),
        [CoarsePos::Det]
            | [CoarsePos::Adp]
            | [CoarsePos::Pron]
            | [CoarsePos::Conj]
            | [CoarsePos::Aux]
            | [CoarsePos::Part]
    )
}

/// Maximal whitespace-adjacent runs of capitalized tokens, with a directly
/// preceding lowercase determiner attached. Runs made only of closed-class
/// words are not noun phrases.
fn capitalized_runs(text: &str, tokens: &[Token<'_>]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let starts_upper = tokens[i].text.chars().next().is_some_and(char::is_uppercase);
        if !starts_upper {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < tokens.len()
            && tokens[j + 1].text.chars().next().is_some_and(char::is_uppercase)
            && adjacent(text, &tokens[j], &tokens[j + 1])
        {
            j += 1;
        }
        if tokens[i..=j].iter().any(|t| !is_closed_class(t.text)) {
            let mut start = tokens[i].start;
            if i > 0
                && is_determiner(&tokens[i - 1].text.to_lowercase())
                && adjacent(text, &tokens[i - 1], &tokens[i])
            {
                start = tokens[i - 1].start;
            }
            runs.push((start, tokens[j].end));
        }
        i = j + 1;
    }
    runs
}

/// Pull the span start left over a directly preceding determiner, so
/// "firm" found after "The" becomes the phrase "The firm".
fn attach_determiner(text: &str, tokens: &[Token<'_>], start: usize) -> usize {
    let Some(i) = tokens.iter().position(|t| t.start == start) else { return start };
    if i > 0
        && is_determiner(&tokens[i - 1].text.to_lowercase())
        && adjacent(text, &tokens[i - 1], &tokens[i])
    {
        tokens[i - 1].start
    } else {
        start
    }
}

fn candidates_in(text: &str, resources: &TagResources) -> Vec<Candidate> {
    let tokens = tokenize(text);
    let mut found: Vec<Candidate> = Vec::new();
    {
        let mut push = |start: usize, end: usize, ttype: Option<TagType>| {
            let start = attach_determiner(text, &tokens, start);
            let last = tokenize(&text[start..end]).last().map(|t| t.text.to_string());
            let number = last.map_or(Number::Singular, |t| token_number(&t));
            found.push(Candidate { start, end, ttype, number });
        };
        for (ttype, lexicon) in &resources.lexicons {
            for (start, end) in phrase_matches(text, lexicon) {
                push(start, end, Some(*ttype));
            }
        }
        let def_probe = NodeId::raw("coref-probe");
        for span in tag_glossary(&def_probe, text, &resources.glossary) {
            push(span.start, span.end, Some(TagType::Def));
        }
        for (start, end) in capitalized_runs(text, &tokens) {
            push(start, end, None);
        }
    }
    // Coordination: two noun phrases joined by "and" form one plural
    // candidate.
    let mut coordinated = Vec::new();
    for a in &found {
        for b in &found {
            if a.end < b.start {
                let gap = &text[a.end..b.start];
                if gap.trim() == "and" && gap.starts_with(char::is_whitespace) {
                    coordinated.push(Candidate {
                        start: a.start,
                        end: b.end,
                        ttype: if a.ttype == b.ttype { a.ttype } else { None },
                        number: Number::Plural,
                    });
                }
            }
        }
    }
    found.extend(coordinated);
    found.sort_by_key(|c| (c.start, c.end));
    found.dedup_by_key(|c| (c.start, c.end));
    found
}

fn pick<'a>(
    candidates: &'a [Candidate],
    before: Option<usize>,
    number: Number,
    filter: &[TagType],
) -> Option<&'a Candidate> {
    candidates
        .iter()
        .filter(|c| before.is_none_or(|limit| c.end <= limit))
        .filter(|c| c.number == number)
        .max_by(|a, b| {
            let a_pref = a.ttype.map(|t| filter.contains(&t)).unwrap_or(false);
            let b_pref = b.ttype.map(|t| filter.contains(&t)).unwrap_or(false);
            a.end
                .cmp(&b.end)
                .then(a_pref.cmp(&b_pref))
                .then((b.start).cmp(&a.start))
                .then(a.ttype.cmp(&b.ttype))
        })
}

fn adjust_case(anaphor_surface: &str, antecedent: &str) -> String {
    let anaphor_upper = anaphor_surface.chars().next().is_some_and(char::is_uppercase);
    let mut chars = antecedent.chars();
    let Some(first) = chars.next() else { return String::new() };
    let rest: &str = chars.as_str();
    if anaphor_upper && first.is_lowercase() {
        return format!("{}{}", first.to_uppercase(), rest);
    }
    // Lowercase only a leading determiner; mid-sentence "An Authorised
    // Person" reads as "an Authorised Person".
    if !anaphor_upper && first.is_uppercase() {
        let first_token = antecedent.split_whitespace().next().unwrap_or("");
        if is_determiner(&first_token.to_lowercase()) {
            return format!("{}{}", first.to_lowercase(), rest);
        }
    }
    antecedent.to_string()
}

/// Find each anaphor occurrence and choose its antecedent. Context holds
/// the original texts of preceding paragraphs, nearest last.
pub fn resolve(
    para_id: &NodeId,
    text: &str,
    context: &[&str],
    rules: &[CorefRule],
    resources: &TagResources,
) -> Enrichment {
    let tokens = tokenize(text);
    let lowered: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
    let local = candidates_in(text, resources);
    let mut replacements: Vec<Replacement> = Vec::new();
    for rule in rules {
        let pattern: Vec<&str> = rule.anaphor.split_whitespace().collect();
        if pattern.is_empty() {
            continue;
        }
        let number = anaphor_number(&rule.anaphor);
        for i in 0..lowered.len() {
            if i + pattern.len() > lowered.len() {
                break;
            }
            let matches = pattern.iter().enumerate().all(|(k, want)| {
                lowered[i + k] == *want
                    && (k == 0 || adjacent(text, &tokens[i + k - 1], &tokens[i + k]))
            });
            if !matches {
                continue;
            }
            let (start, end) = (tokens[i].start, tokens[i + pattern.len() - 1].end);
            if replacements.iter().any(|r| r.start < end && start < r.end) {
                continue;
            }
            let mut antecedent: Option<String> = None;
            if let Some(c) = pick(&local, Some(start), number, &rule.antecedent_filter) {
                antecedent = Some(text[c.start..c.end].to_string());
            } else {
                for (dist, prev) in context.iter().rev().enumerate() {
                    if dist >= rule.search_window {
                        break;
                    }
                    let prior = candidates_in(prev, resources);
                    if let Some(c) = pick(&prior, None, number, &rule.antecedent_filter) {
                        antecedent = Some(prev[c.start..c.end].to_string());
                        break;
                    }
                }
            }
            let Some(surface) = antecedent else { continue };
            let original = text[start..end].to_string();
            let substituted = adjust_case(&original, &surface);
            replacements.push(Replacement { start, end, original, substituted });
        }
    }
    replacements.sort_by_key(|r| (r.start, r.end));
    Enrichment { para_id: para_id.clone(), replacements }
}
