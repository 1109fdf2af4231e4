//! Entity linking: collapse span occurrences into canonical tags keyed by
//! (type, normalized lemma).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ids::NodeId;
use crate::lemma::{is_determiner, is_stopword, lemmatize};
use crate::taggers::SpanTag;
use crate::taxonomy::TagType;
use crate::tokens::tokenize;

/// Canonical entity node: all occurrences sharing (ttype, lemma).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tag {
    pub tag_id: NodeId,
    pub ttype: TagType,
    pub lemma: String,
}

/// One in-text occurrence, linked to exactly one canonical tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagOccur {
    pub occur_id: NodeId,
    pub para_id: NodeId,
    pub ttype: TagType,
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub linked_tag: NodeId,
}

/// Normalize a surface form to its lemma phrase: lemmatize every token,
/// drop determiners wherever they appear, then strip stopwords and bare
/// single-character tokens from the edges. The empty result is legal and
/// marks a degenerate tag.
pub fn normalize_lemma(surface: &str) -> String {
    let mut lemmas: Vec<String> = tokenize(surface)
        .iter()
        .map(|t| lemmatize(t.text))
        .filter(|l| !l.is_empty() && !is_determiner(l))
        .collect();
    loop {
        let before = lemmas.len();
        while lemmas.first().is_some_and(|l| is_stopword(l) || l.chars().count() <= 1) {
            lemmas.remove(0);
        }
        while lemmas.last().is_some_and(|l| is_stopword(l) || l.chars().count() <= 1) {
            lemmas.pop();
        }
        if lemmas.len() == before {
            break;
        }
    }
    lemmas.join(" ")
}

/// Merge occurrences into canonical tags. Tags come out sorted by
/// (ttype, lemma); occurrences keep their input order.
pub fn link(occurrences: &[SpanTag]) -> (Vec<Tag>, Vec<TagOccur>) {
    let mut tags: BTreeMap<(TagType, String), NodeId> = BTreeMap::new();
    let mut occurs = Vec::with_capacity(occurrences.len());
    for span in occurrences {
        let lemma = normalize_lemma(&span.surface);
        let tag_id = tags
            .entry((span.ttype, lemma.clone()))
            .or_insert_with(|| NodeId::tag(span.ttype.code(), &lemma))
            .clone();
        occurs.push(TagOccur {
            occur_id: NodeId::occurrence(&span.para_id, span.ttype.code(), span.start, span.end),
            para_id: span.para_id.clone(),
            ttype: span.ttype,
            start: span.start,
            end: span.end,
            text: span.surface.clone(),
            linked_tag: tag_id,
        });
    }
    let tags =
        tags.into_iter().map(|((ttype, lemma), tag_id)| Tag { tag_id, ttype, lemma }).collect();
    (tags, occurs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(ordinal: usize, start: usize, surface: &str, ttype: TagType) -> SpanTag {
        SpanTag {
            para_id: NodeId::paragraph("T", ordinal),
            start,
            end: start + surface.len(),
            ttype,
            surface: surface.to_string(),
            tagger_id: "test".into(),
        }
    }

    #[test]
    fn normalizes_the_crypto_phrase() {
        assert_eq!(
            normalize_lemma("Operating a Crypto Asset Business"),
            "operate crypto asset business"
        );
    }

    #[test]
    fn single_token_lemmatization() {
        assert_eq!(normalize_lemma("risks"), "risk");
    }

    #[test]
    fn punctuation_only_surfaces_normalize_to_empty() {
        assert_eq!(normalize_lemma("c)"), "");
        assert_eq!(normalize_lemma("U.A.E."), "");
        assert_eq!(normalize_lemma("unless"), "");
        assert_eq!(normalize_lemma("if the"), "");
    }

    #[test]
    fn inner_stopwords_survive() {
        assert_eq!(
            normalize_lemma("dealing in investments as principal"),
            "deal in investment as principal"
        );
    }

    #[test]
    fn normalization_is_idempotent_and_case_insensitive() {
        for surface in [
            "Operating a Crypto Asset Business",
            "dealing in investments as principal",
            "Risks",
            "the Regulator",
            "c)",
        ] {
            let once = normalize_lemma(surface);
            assert_eq!(normalize_lemma(&once), once, "not idempotent for {surface:?}");
            assert_eq!(normalize_lemma(&surface.to_uppercase()), once);
        }
    }

    #[test]
    fn shared_lemma_shares_one_tag() {
        let spans = vec![span(0, 0, "Risks", TagType::Risk), span(1, 5, "risk", TagType::Risk)];
        let (tags, occurs) = link(&spans);
        assert_eq!(tags.len(), 1);
        assert_eq!(occurs.len(), 2);
        assert_eq!(tags[0].lemma, "risk");
        assert!(occurs.iter().all(|o| o.linked_tag == tags[0].tag_id));
    }

    #[test]
    fn empty_input_links_nothing() {
        let (tags, occurs) = link(&[]);
        assert!(tags.is_empty() && occurs.is_empty());
    }

    #[test]
    fn type_is_part_of_the_key() {
        let spans = vec![span(0, 0, "custody", TagType::Fs), span(0, 10, "custody", TagType::Act)];
        let (tags, occurs) = link(&spans);
        assert_eq!(tags.len(), 2);
        assert_eq!(occurs.len(), 2);
        assert_ne!(occurs[0].linked_tag, occurs[1].linked_tag);
    }

    #[test]
    fn empty_lemma_tags_are_created() {
        let spans = vec![span(0, 0, "c)", TagType::Def)];
        let (tags, occurs) = link(&spans);
        assert_eq!(tags.len(), 1);
        assert_eq!(tags[0].lemma, "");
        assert_eq!(occurs[0].linked_tag, tags[0].tag_id);
    }

    #[test]
    fn relinking_linked_output_is_stable() {
        let spans = vec![
            span(0, 0, "Operating a Crypto Asset Business", TagType::Perm),
            span(2, 4, "operate crypto asset business", TagType::Perm),
        ];
        let (tags, occurs) = link(&spans);
        assert_eq!(tags.len(), 1);
        let respan: Vec<SpanTag> = occurs
            .iter()
            .map(|o| SpanTag {
                para_id: o.para_id.clone(),
                start: o.start,
                end: o.end,
                ttype: o.ttype,
                surface: o.text.clone(),
                tagger_id: "relink".into(),
            })
            .collect();
        let (tags2, _) = link(&respan);
        assert_eq!(tags, tags2);
    }
}
