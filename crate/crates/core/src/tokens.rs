//! Word tokenization with byte offsets.
//!
//! All span offsets in the pipeline are UTF-8 byte offsets produced at
//! character boundaries, so `&text[start..end]` is always valid.

/// A word token: a maximal run of alphanumeric characters (apostrophes
/// allowed inside, so "firm's" stays one token).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub start: usize,
    pub end: usize,
    pub text: &'a str,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Split `text` into word tokens. Punctuation and whitespace are skipped;
/// they act only as separators.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (idx, ch) in text.char_indices() {
        if is_word_char(ch) {
            if start.is_none() {
                start = Some(idx);
            }
        } else if let Some(s) = start.take() {
            tokens.push(Token { start: s, end: idx, text: &text[s..idx] });
        }
    }
    if let Some(s) = start {
        tokens.push(Token { start: s, end: text.len(), text: &text[s..] });
    }
    tokens
}

/// True when tokens `a` and `b` are separated by whitespace only.
/// Phrase matchers use this so a match never crosses punctuation.
pub fn adjacent(text: &str, a: &Token<'_>, b: &Token<'_>) -> bool {
    text[a.end..b.start].chars().all(char::is_whitespace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_punctuation_and_whitespace() {
        let toks = tokenize("Digital Assets, Robo Advisory.");
        let texts: Vec<&str> = toks.iter().map(|t| t.text).collect();
        assert_eq!(texts, vec!["Digital", "Assets", "Robo", "Advisory"]);
    }

    #[test]
    fn offsets_slice_back_to_text() {
        let text = "the firm's records (a) and c)";
        for tok in tokenize(text) {
            assert_eq!(&text[tok.start..tok.end], tok.text);
        }
    }

    #[test]
    fn adjacency_rejects_punctuation_gaps() {
        let text = "credit, facility and credit facility";
        let toks = tokenize(text);
        assert!(!adjacent(text, &toks[0], &toks[1]));
        assert!(adjacent(text, &toks[3], &toks[4]));
    }

    #[test]
    fn empty_and_punct_only_inputs() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ,.;() ").is_empty());
    }
}
