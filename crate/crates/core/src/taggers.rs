//! Reference tagger implementations behind a deterministic contract.
//!
//! DEF spans come from a glossary of (lemma, part-of-speech) masks. Every
//! other type is tagged from a lemma-phrase lexicon plus declarative
//! pattern rules (trigger regex with a span-extension mode). All taggers
//! are pure functions of (text, resources).

use std::collections::BTreeMap;

use regex::RegexBuilder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::lemma::{is_modal, is_verb_lemma, lemmatize, possible_pos, CoarsePos};
use crate::sentences::split_sentences;
use crate::taxonomy::{TagType, TaggerGroup};
use crate::tokens::{adjacent, tokenize, Token};

/// One typed character span over a paragraph's (enriched) text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanTag {
    pub para_id: NodeId,
    pub start: usize,
    pub end: usize,
    pub ttype: TagType,
    pub surface: String,
    pub tagger_id: String,
}

impl SpanTag {
    pub fn validate(&self, text: &str) -> Result<()> {
        if self.start >= self.end || self.end > text.len() {
            return Err(Error::Invalid(format!(
                "span {}..{} out of bounds for text of length {}",
                self.start,
                self.end,
                text.len()
            )));
        }
        if !text.is_char_boundary(self.start) || !text.is_char_boundary(self.end) {
            return Err(Error::Invalid(format!(
                "span {}..{} does not fall on character boundaries",
                self.start, self.end
            )));
        }
        if self.surface != text[self.start..self.end] {
            return Err(Error::Invalid(format!(
                "span surface {:?} differs from text slice {:?}",
                self.surface,
                &text[self.start..self.end]
            )));
        }
        Ok(())
    }
}

/// Glossary entry: the defined term and its (lemma, coarse POS) mask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryEntry {
    pub term: String,
    pub lemma_mask: Vec<(String, CoarsePos)>,
}

/// Parse the glossary CSV (columns `term,lemma_mask`, mask tokens encoded
/// `lemma/POS` separated by spaces). Mask lemmas are re-normalized through
/// the lemmatizer at load so entry authors can write surface forms.
pub fn parse_glossary(src: &str) -> Result<Vec<GlossaryEntry>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(src.as_bytes());
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Invalid(format!("glossary csv: {e}")))?;
        let term = record.get(0).unwrap_or("").trim().to_string();
        let mask_src = record.get(1).unwrap_or("").trim();
        if term.is_empty() {
            return Err(Error::Invalid("glossary entry with empty term".into()));
        }
        let mut lemma_mask = Vec::new();
        for piece in mask_src.split_whitespace() {
            let (lemma, pos) = piece.rsplit_once('/').ok_or_else(|| {
                Error::Invalid(format!(
                    "glossary term {term:?}: mask token {piece:?} is not lemma/POS"
                ))
            })?;
            let pos: CoarsePos = pos.parse().map_err(Error::Invalid)?;
            lemma_mask.push((lemmatize(lemma), pos));
        }
        if lemma_mask.is_empty() {
            return Err(Error::Invalid(format!("glossary term {term:?} has an empty lemma mask")));
        }
        entries.push(GlossaryEntry { term, lemma_mask });
    }
    Ok(entries)
}

/// Lemma-sequence phrase list for one tag type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub phrases: Vec<Vec<String>>,
}

impl Lexicon {
    /// One phrase per line; tokens normalized through the lemmatizer.
    pub fn parse(src: &str) -> Lexicon {
        let phrases = src
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(lemmatize).collect())
            .collect();
        Lexicon { phrases }
    }
}

/// How a pattern trigger match grows into a tagged span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanExtension {
    /// Trigger start through the end of the containing sentence, with the
    /// closing terminator excluded.
    SentenceEnd,
    /// Trigger plus the immediately following verb group.
    VerbPhrase,
    /// The trigger match alone.
    TriggerOnly,
}

impl std::str::FromStr for SpanExtension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence-end" => Ok(SpanExtension::SentenceEnd),
            "verb-phrase" => Ok(SpanExtension::VerbPhrase),
            "trigger-only" => Ok(SpanExtension::TriggerOnly),
            other => Err(Error::Invalid(format!(
                "unknown span extension {other:?}; expected sentence-end, verb-phrase or trigger-only"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PatternRule {
    pub trigger: regex::Regex,
    pub extension: SpanExtension,
    pub ttype: TagType,
}

#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    pub rules: Vec<PatternRule>,
}

impl PatternSet {
    /// One rule per line: `trigger regex => extension => TTYPE`.
    pub fn parse(src: &str) -> Result<PatternSet> {
        let mut rules = Vec::new();
        for (idx, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split("=>").map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::format(
                    idx + 1,
                    "pattern rule must be: trigger => extension => TTYPE",
                ));
            }
            let trigger = RegexBuilder::new(parts[0])
                .case_insensitive(true)
                .build()
                .map_err(|e| Error::format(idx + 1, format!("bad trigger regex: {e}")))?;
            let extension: SpanExtension = parts[1].parse()?;
            let ttype: TagType = parts[2].parse()?;
            rules.push(PatternRule { trigger, extension, ttype });
        }
        Ok(PatternSet { rules })
    }

    pub fn for_type(&self, ttype: TagType) -> Vec<&PatternRule> {
        self.rules.iter().filter(|r| r.ttype == ttype).collect()
    }
}

/// Everything the group runner needs: glossary for DEF, a lexicon per
/// other configured type, shared pattern rules.
#[derive(Debug, Clone, Default)]
pub struct TagResources {
    pub glossary: Vec<GlossaryEntry>,
    pub lexicons: BTreeMap<TagType, Lexicon>,
    pub patterns: PatternSet,
}

struct TokenView<'a> {
    text: &'a str,
    tokens: Vec<Token<'a>>,
    lemmas: Vec<String>,
}

impl<'a> TokenView<'a> {
    fn new(text: &'a str) -> Self {
        let tokens = tokenize(text);
        let lemmas = tokens.iter().map(|t| lemmatize(t.text)).collect();
        TokenView { text, tokens, lemmas }
    }

    /// Token window [i, i+len) matches when lemmas agree and consecutive
    /// tokens are separated by whitespace only.
    fn phrase_at(&self, i: usize, phrase: &[String]) -> bool {
        if phrase.is_empty() || i + phrase.len() > self.tokens.len() {
            return false;
        }
        for (k, want) in phrase.iter().enumerate() {
            if &self.lemmas[i + k] != want {
                return false;
            }
            if k > 0 && !adjacent(self.text, &self.tokens[i + k - 1], &self.tokens[i + k]) {
                return false;
            }
        }
        true
    }
}

fn candidate_to_span(
    para_id: &NodeId,
    text: &str,
    start: usize,
    end: usize,
    ttype: TagType,
    tagger_id: &str,
) -> SpanTag {
    SpanTag {
        para_id: para_id.clone(),
        start,
        end,
        ttype,
        surface: text[start..end].to_string(),
        tagger_id: tagger_id.to_string(),
    }
}

/// Greedy longest-match selection: candidates sorted by (start, widest,
/// tagger id); later candidates overlapping an accepted one are dropped.
fn select_non_overlapping(mut candidates: Vec<SpanTag>) -> Vec<SpanTag> {
    candidates.sort_by(|a, b| {
        a.start.cmp(&b.start).then(b.end.cmp(&a.end)).then(a.tagger_id.cmp(&b.tagger_id))
    });
    let mut selected: Vec<SpanTag> = Vec::new();
    for cand in candidates {
        if selected.last().is_none_or(|prev| cand.start >= prev.end) {
            selected.push(cand);
        }
    }
    selected
}

/// All lexicon phrase match ranges in `text`, overlaps included. Used by
/// the coreference resolver to find typed noun-phrase candidates.
pub fn phrase_matches(text: &str, lexicon: &Lexicon) -> Vec<(usize, usize)> {
    let view = TokenView::new(text);
    let mut out = Vec::new();
    for i in 0..view.tokens.len() {
        for phrase in &lexicon.phrases {
            if view.phrase_at(i, phrase) {
                out.push((view.tokens[i].start, view.tokens[i + phrase.len() - 1].end));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// DEF tagging: longest glossary mask match at each token position wins.
pub fn tag_glossary(para_id: &NodeId, text: &str, glossary: &[GlossaryEntry]) -> Vec<SpanTag> {
    let view = TokenView::new(text);
    let mut candidates = Vec::new();
    for i in 0..view.tokens.len() {
        for entry in glossary {
            let mask = &entry.lemma_mask;
            if i + mask.len() > view.tokens.len() {
                continue;
            }
            let matches = mask.iter().enumerate().all(|(k, (lemma, pos))| {
                &view.lemmas[i + k] == lemma
                    && possible_pos(view.tokens[i + k].text).contains(pos)
                    && (k == 0 || adjacent(text, &view.tokens[i + k - 1], &view.tokens[i + k]))
            });
            if matches {
                let start = view.tokens[i].start;
                let end = view.tokens[i + mask.len() - 1].end;
                candidates.push(candidate_to_span(
                    para_id,
                    text,
                    start,
                    end,
                    TagType::Def,
                    "glossary",
                ));
            }
        }
    }
    select_non_overlapping(candidates)
}

fn sentence_body_end(text: &str, sentence_end: usize) -> usize {
    let mut end = sentence_end;
    while end > 0 {
        let slice = &text[..end];
        let Some(c) = slice.chars().next_back() else { break };
        if matches!(c, '.' | ';' | '?' | '!') || c.is_whitespace() {
            end -= c.len_utf8();
        } else {
            break;
        }
    }
    end
}

fn extend_span(
    view: &TokenView<'_>,
    trigger_start: usize,
    trigger_end: usize,
    ext: SpanExtension,
) -> Option<(usize, usize)> {
    match ext {
        SpanExtension::TriggerOnly => Some((trigger_start, trigger_end)),
        SpanExtension::SentenceEnd => {
            let sentence = split_sentences(view.text)
                .into_iter()
                .find(|s| s.start <= trigger_start && trigger_start < s.end)?;
            let end = sentence_body_end(view.text, sentence.end);
            (trigger_start < end).then_some((trigger_start, end))
        }
        SpanExtension::VerbPhrase => {
            let mut end = trigger_end;
            let mut prev: Option<usize> = None;
            let mut saw_verb = false;
            for (i, tok) in view.tokens.iter().enumerate() {
                if tok.start < trigger_end {
                    continue;
                }
                let lemma = view.lemmas[i].as_str();
                let verbal = is_verb_lemma(lemma) || is_modal(lemma) || lemma == "to";
                let particle = saw_verb && matches!(lemma, "on" | "out" | "up" | "off");
                let joined = match prev {
                    None => view.text[trigger_end..tok.start].chars().all(char::is_whitespace),
                    Some(p) => adjacent(view.text, &view.tokens[p], tok),
                };
                if (verbal || particle) && joined {
                    saw_verb = saw_verb || is_verb_lemma(lemma);
                    end = tok.end;
                    prev = Some(i);
                } else {
                    break;
                }
            }
            Some((trigger_start, end))
        }
    }
}

/// Lexicon + pattern tagging for one non-DEF type. Output spans never
/// overlap each other.
pub fn tag_lexicon(
    para_id: &NodeId,
    text: &str,
    ttype: TagType,
    lexicon: &Lexicon,
    patterns: &PatternSet,
) -> Result<Vec<SpanTag>> {
    if ttype == TagType::Def {
        return Err(Error::Domain("DEF is tagged from the glossary, not a lexicon".into()));
    }
    let view = TokenView::new(text);
    let mut candidates = Vec::new();
    for i in 0..view.tokens.len() {
        for phrase in &lexicon.phrases {
            if view.phrase_at(i, phrase) {
                let start = view.tokens[i].start;
                let end = view.tokens[i + phrase.len() - 1].end;
                candidates.push(candidate_to_span(para_id, text, start, end, ttype, "lexicon"));
            }
        }
    }
    for rule in patterns.for_type(ttype) {
        for m in rule.trigger.find_iter(text) {
            if let Some((start, end)) = extend_span(&view, m.start(), m.end(), rule.extension) {
                if start < end {
                    candidates.push(candidate_to_span(para_id, text, start, end, ttype, "pattern"));
                }
            }
        }
    }
    Ok(select_non_overlapping(candidates))
}

/// Run every tagger of one model group over a paragraph's text. Spans of
/// different types may overlap; per type they never do.
pub fn run_group(
    para_id: &NodeId,
    text: &str,
    group: &TaggerGroup,
    resources: &TagResources,
) -> Result<Vec<SpanTag>> {
    let mut spans = Vec::new();
    for &ttype in &group.covers {
        if ttype == TagType::Def {
            spans.extend(tag_glossary(para_id, text, &resources.glossary));
        } else {
            let lexicon = resources.lexicons.get(&ttype).ok_or_else(|| {
                Error::MissingResource(format!("no lexicon configured for tag type {ttype}"))
            })?;
            spans.extend(tag_lexicon(para_id, text, ttype, lexicon, &resources.patterns)?);
        }
    }
    spans.sort_by(|a, b| a.start.cmp(&b.start).then(a.end.cmp(&b.end)).then(a.ttype.cmp(&b.ttype)));
    Ok(spans)
}
