//! Sentence segmentation over paragraph text.
//!
//! A terminator (`.`, `;`, `?`, `!`) followed by whitespace or end of input
//! closes a sentence, except when the dot belongs to a known abbreviation
//! or to a list marker such as `1.` or `iv.` at the start of a line.
//! Returned spans are trimmed byte ranges into the original text; the text
//! between consecutive spans is always whitespace, so the input can be
//! reconstructed from the spans and the gaps.

use std::collections::HashSet;
use std::sync::OnceLock;

const ABBREVIATIONS_SRC: &str = include_str!("../resources/abbreviations.txt");

/// Dotted forms that never close a sentence, compared case-insensitively
/// against the maximal non-whitespace run ending at the dot.
#[derive(Debug, Clone)]
pub struct Abbreviations {
    forms: HashSet<String>,
}

impl Abbreviations {
    pub fn parse(src: &str) -> Self {
        let forms = src
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Abbreviations { forms }
    }

    pub fn builtin() -> &'static Abbreviations {
        static BUILTIN: OnceLock<Abbreviations> = OnceLock::new();
        BUILTIN.get_or_init(|| Abbreviations::parse(ABBREVIATIONS_SRC))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.forms.contains(&token.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

impl Default for Abbreviations {
    fn default() -> Self {
        Abbreviations::parse(ABBREVIATIONS_SRC)
    }
}

/// Trimmed byte range of one sentence within the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence {
    pub start: usize,
    pub end: usize,
}

impl Sentence {
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | ';' | '?' | '!')
}

/// `1.`, `12.`, `a.`, `iv.`, `(a)`, `c)` shaped tokens.
fn is_list_marker(token: &str) -> bool {
    let body = token.strip_prefix('(').unwrap_or(token);
    let body = match body.strip_suffix(')').or_else(|| body.strip_suffix('.')) {
        Some(b) => b,
        None => return false,
    };
    if body.is_empty() || body.len() > 4 {
        return false;
    }
    let digits = body.chars().all(|c| c.is_ascii_digit());
    let roman = body.chars().all(|c| "ivxlc".contains(c.to_ascii_lowercase()));
    let single_letter = body.len() == 1 && body.chars().all(|c| c.is_ascii_alphabetic());
    digits || roman || single_letter
}

/// Maximal run of non-whitespace characters ending at `end` (exclusive).
fn token_ending_at(text: &str, end: usize) -> (usize, &str) {
    let mut start = end;
    for (i, c) in text[..end].char_indices().rev() {
        if c.is_whitespace() {
            break;
        }
        start = i;
    }
    (start, &text[start..end])
}

fn at_line_start(text: &str, pos: usize) -> bool {
    text[..pos].chars().rev().take_while(|c| *c != '\n').all(char::is_whitespace)
}

fn trimmed_span(text: &str, start: usize, end: usize) -> Option<Sentence> {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    let (s, e) = (start + lead, end - trail);
    (s < e).then_some(Sentence { start: s, end: e })
}

pub fn split_sentences(text: &str) -> Vec<Sentence> {
    split_sentences_with(text, Abbreviations::builtin())
}

pub fn split_sentences_with(text: &str, abbreviations: &Abbreviations) -> Vec<Sentence> {
    let mut spans = Vec::new();
    let mut sentence_start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !is_terminator(c) {
            continue;
        }
        let boundary = i + c.len_utf8();
        match chars.peek() {
            Some((_, next)) if !next.is_whitespace() => continue,
            _ => {}
        }
        if c == '.' {
            let (tok_start, token) = token_ending_at(text, boundary);
            if abbreviations.contains(token) {
                continue;
            }
            if is_list_marker(token) && at_line_start(text, tok_start) {
                continue;
            }
        }
        if let Some(span) = trimmed_span(text, sentence_start, boundary) {
            spans.push(span);
        }
        sentence_start = boundary;
    }
    if let Some(span) = trimmed_span(text, sentence_start, text.len()) {
        spans.push(span);
    }
    if spans.is_empty() {
        if let Some(span) = trimmed_span(text, 0, text.len()) {
            spans.push(span);
        }
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(source: &str) -> Vec<&str> {
        split_sentences(source).iter().map(|s| s.text(source)).collect()
    }

    #[test]
    fn splits_on_terminators() {
        assert_eq!(
            texts("The firm must comply. It shall report quarterly; failures are notified."),
            vec!["The firm must comply.", "It shall report quarterly;", "failures are notified."]
        );
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            texts("Banks in the U.A.E. operate under licence."),
            vec!["Banks in the U.A.E. operate under licence."]
        );
        assert_eq!(
            texts("Certain assets, e.g. tokens, are excluded."),
            vec!["Certain assets, e.g. tokens, are excluded."]
        );
    }

    #[test]
    fn list_markers_at_line_start_do_not_split() {
        let text = "1. The firm must hold capital.\niv. It must report.";
        assert_eq!(texts(text), vec!["1. The firm must hold capital.", "iv. It must report."]);
    }

    #[test]
    fn numbers_mid_line_still_split() {
        assert_eq!(texts("See Rule 3. It applies here."), vec!["See Rule 3.", "It applies here."]);
    }

    #[test]
    fn unterminated_text_is_one_span() {
        assert_eq!(texts("No terminator here"), vec!["No terminator here"]);
        assert_eq!(texts("   "), Vec::<&str>::new());
    }

    #[test]
    fn decimal_points_do_not_split() {
        assert_eq!(texts("A fee of 2.5 percent applies."), vec!["A fee of 2.5 percent applies."]);
    }

    #[test]
    fn spans_reconstruct_input() {
        let text = "One. Two!  Three;\n  1. Four.";
        let spans = split_sentences(text);
        let mut cursor = 0;
        for span in &spans {
            assert!(text[cursor..span.start].chars().all(char::is_whitespace));
            cursor = span.end;
        }
        assert!(text[cursor..].chars().all(char::is_whitespace));
    }
}
