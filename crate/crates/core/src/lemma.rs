//! Deterministic rule-table lemmatization and coarse part-of-speech hints.
//!
//! The lemmatizer lowercases, strips possessives, looks irregular forms up
//! in a shipped table, then applies plural and verbal suffix rules in
//! sequence. It is idempotent: `lemmatize(lemmatize(t)) == lemmatize(t)`.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const IRREGULARS_SRC: &str = include_str!("../resources/irregular_lemmas.txt");
const STOPWORDS_SRC: &str = include_str!("../resources/stopwords.txt");
const VERBS_SRC: &str = include_str!("../resources/verbs.txt");

fn irregulars() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| {
        IRREGULARS_SRC
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                let mut parts = l.split_whitespace();
                Some((parts.next()?, parts.next()?))
            })
            .collect()
    })
}

fn word_set(
    src: &'static str,
    set: &'static OnceLock<HashSet<&'static str>>,
) -> &'static HashSet<&'static str> {
    set.get_or_init(|| {
        src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
    })
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    word_set(STOPWORDS_SRC, &SET)
}

fn verb_lemmas() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    word_set(VERBS_SRC, &SET)
}

pub fn is_stopword(lemma: &str) -> bool {
    stopwords().contains(lemma)
}

/// Determiners are dropped anywhere inside a normalized lemma phrase;
/// other stopwords only at the edges.
pub fn is_determiner(word: &str) -> bool {
    matches!(word, "a" | "an" | "the")
}

pub fn is_modal(word: &str) -> bool {
    matches!(
        word,
        "must"
            | "shall"
            | "may"
            | "can"
            | "will"
            | "would"
            | "should"
            | "could"
            | "might"
            | "cannot"
    )
}

/// True when `lemma` is in the shipped verb lexicon.
pub fn is_verb_lemma(lemma: &str) -> bool {
    verb_lemmas().contains(lemma)
}

fn ends_with_any(s: &str, suffixes: &[&str]) -> bool {
    suffixes.iter().any(|suf| s.ends_with(suf))
}

/// Stem endings that take back a dropped final 'e' after -ing/-ed stripping
/// ("operat" -> "operate", "ensur" -> "ensure").
const E_RESTORE: &[&str] = &[
    "at", "iz", "is", "ur", "ag", "uc", "as", "os", "aus", "ceiv", "uir", "vid", "rg", "olv",
    "erv", "av", "but", "cut",
];

fn restore_stem(stem: String) -> String {
    let bytes = stem.as_bytes();
    let n = bytes.len();
    if n >= 2 && bytes[n - 1] == bytes[n - 2] {
        let c = bytes[n - 1] as char;
        if c.is_ascii_alphabetic() && !"aeiousz".contains(c) {
            return stem[..n - 1].to_string();
        }
    }
    if ends_with_any(&stem, E_RESTORE) && !stem.ends_with("ss") {
        let mut s = stem;
        s.push('e');
        return s;
    }
    // A stem the plural rule would re-strip ("laps", "licens") keeps its
    // dropped 'e' instead, so the result is a stable lemma.
    if stem.ends_with('s') && stem.len() > 3 && !ends_with_any(&stem, &["ss", "us", "sis"]) {
        let mut s = stem;
        s.push('e');
        return s;
    }
    stem
}

fn strip_plural(word: &str) -> String {
    let n = word.len();
    if word.ends_with("ies") && n > 4 {
        return format!("{}y", &word[..n - 3]);
    }
    if ends_with_any(word, &["sses", "xes", "zes", "ches", "shes"]) && n > 4 {
        return word[..n - 2].to_string();
    }
    if word.ends_with('s') && n > 3 && !ends_with_any(word, &["ss", "us", "sis"]) {
        return word[..n - 1].to_string();
    }
    word.to_string()
}

fn strip_verbal(word: &str) -> String {
    let n = word.len();
    if word.ends_with("ing") && n > 5 {
        return restore_stem(word[..n - 3].to_string());
    }
    if word.ends_with("ied") && n > 4 {
        return format!("{}y", &word[..n - 3]);
    }
    if word.ends_with("eed") && n > 4 {
        // Only verbs lose the 'd' ("agreed" -> "agree"); lemmas like
        // "speed" or "indeed" pass through untouched.
        let stem = &word[..n - 1];
        if is_verb_lemma(stem) {
            return stem.to_string();
        }
        return word.to_string();
    }
    if word.ends_with("ed") && n > 4 {
        return restore_stem(word[..n - 2].to_string());
    }
    word.to_string()
}

fn lemma_pass(word: &str) -> String {
    if let Some(lemma) = irregulars().get(word) {
        return (*lemma).to_string();
    }
    let stripped = strip_plural(word);
    if let Some(lemma) = irregulars().get(stripped.as_str()) {
        return (*lemma).to_string();
    }
    strip_verbal(&stripped)
}

/// Normalize one token to its lemma. Lowercases, strips a possessive
/// marker, resolves irregular forms, then applies plural and verbal
/// suffix rules until the word stops changing, so a lemma maps to itself.
pub fn lemmatize(token: &str) -> String {
    let mut word = token.to_lowercase();
    if word.ends_with("'s") {
        word.truncate(word.len() - 2);
    } else if word.ends_with('\'') {
        word.truncate(word.len() - 1);
    }
    // Real vocabulary settles in one or two passes; the cap only bounds
    // adversarial input.
    for _ in 0..16 {
        let next = lemma_pass(&word);
        if next == word {
            break;
        }
        word = next;
    }
    word
}

/// Coarse universal part-of-speech classes used by glossary lemma masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarsePos {
    #[serde(rename = "NOUN")]
    Noun,
    #[serde(rename = "VERB")]
    Verb,
    #[serde(rename = "ADJ")]
    Adj,
    #[serde(rename = "ADV")]
    Adv,
    #[serde(rename = "DET")]
    Det,
    #[serde(rename = "ADP")]
    Adp,
    #[serde(rename = "PRON")]
    Pron,
    #[serde(rename = "CONJ")]
    Conj,
    #[serde(rename = "AUX")]
    Aux,
    #[serde(rename = "NUM")]
    Num,
    #[serde(rename = "PART")]
    Part,
}

impl FromStr for CoarsePos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NOUN" => Ok(CoarsePos::Noun),
            "VERB" => Ok(CoarsePos::Verb),
            "ADJ" => Ok(CoarsePos::Adj),
            "ADV" => Ok(CoarsePos::Adv),
            "DET" => Ok(CoarsePos::Det),
            "ADP" => Ok(CoarsePos::Adp),
            "PRON" => Ok(CoarsePos::Pron),
            "CONJ" => Ok(CoarsePos::Conj),
            "AUX" => Ok(CoarsePos::Aux),
            "NUM" => Ok(CoarsePos::Num),
            "PART" => Ok(CoarsePos::Part),
            other => Err(format!("unknown part-of-speech code {other:?}")),
        }
    }
}

impl CoarsePos {
    pub fn code(self) -> &'static str {
        match self {
            CoarsePos::Noun => "NOUN",
            CoarsePos::Verb => "VERB",
            CoarsePos::Adj => "ADJ",
            CoarsePos::Adv => "ADV",
            CoarsePos::Det => "DET",
            CoarsePos::Adp => "ADP",
            CoarsePos::Pron => "PRON",
            CoarsePos::Conj => "CONJ",
            CoarsePos::Aux => "AUX",
            CoarsePos::Num => "NUM",
            CoarsePos::Part => "PART",
        }
    }
}

fn closed_class(word: &str) -> Option<CoarsePos> {
    use CoarsePos::*;
    let pos = match word {
        "a" | "an" | "the" | "this" | "these" | "those" | "each" | "every" | "some" | "no"
        | "all" | "both" | "either" | "neither" | "such" | "any" => Det,
        "of" | "in" | "on" | "at" | "by" | "for" | "with" | "from" | "into" | "onto" | "under"
        | "over" | "between" | "among" | "through" | "within" | "without" | "during"
        | "against" | "about" | "above" | "below" | "after" | "before" | "per" | "as" => Adp,
        "it" | "they" | "them" | "their" | "he" | "she" | "him" | "her" | "his" | "hers" | "we"
        | "us" | "our" | "you" | "your" | "i" | "me" | "my" | "who" | "whom" | "whose"
        | "which" | "itself" | "themselves" => Pron,
        "and" | "or" | "but" | "nor" | "so" | "yet" | "if" | "because" | "although" | "unless"
        | "while" | "whereas" | "whether" | "that" | "than" | "when" | "where" => Conj,
        "be" | "am" | "is" | "are" | "was" | "were" | "been" | "being" | "have" | "has" | "had"
        | "having" | "do" | "does" | "did" | "done" | "doing" | "must" | "shall" | "should"
        | "may" | "might" | "can" | "could" | "will" | "would" | "cannot" => Aux,
        "not" | "to" => Part,
        _ => return None,
    };
    Some(pos)
}

/// The set of coarse classes a token could belong to. Closed-class words
/// resolve to a single class; open-class words get a candidate set from
/// suffix shape. A glossary mask entry matches when its class is in the set.
pub fn possible_pos(token: &str) -> Vec<CoarsePos> {
    use CoarsePos::*;
    let lower = token.to_lowercase();
    if !lower.is_empty()
        && lower.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',' || c == '%')
        && lower.chars().any(|c| c.is_ascii_digit())
    {
        return vec![Num];
    }
    if let Some(pos) = closed_class(&lower) {
        return vec![pos];
    }
    if lower.ends_with("ly") {
        return vec![Adv, Adj];
    }
    if ends_with_any(
        &lower,
        &["tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "hood", "ism", "age"],
    ) {
        return vec![Noun];
    }
    if ends_with_any(&lower, &["ous", "ive", "ful", "less", "able", "ible", "ic", "ary", "al"]) {
        return vec![Adj, Noun];
    }
    if lower.ends_with("ed") {
        return vec![Adj, Verb];
    }
    if lower.ends_with("ing") {
        return vec![Noun, Adj, Verb];
    }
    vec![Noun, Adj, Verb]
}
