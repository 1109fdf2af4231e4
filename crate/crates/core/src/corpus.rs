//! Document ingestion into an ordered Paragraph list with heading depth.
//!
//! Two source formats normalize to the same model. The text format treats
//! lines opening with 1..=6 `#` marks as headings (plevel = count - 1) and
//! blank-line separated runs of other lines as body paragraphs carrying the
//! plevel of the most recent heading. The JSON-lines format carries one
//! `{"text", "plevel"}` object per line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: NodeId,
    pub title: String,
    pub paragraph_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub para_id: NodeId,
    pub doc_id: NodeId,
    pub ordinal: usize,
    pub plevel: u32,
    pub text: String,
    /// Coreference-enriched variant; equals `text` until enrichment runs.
    pub enriched_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestedDocument {
    pub document: Document,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub format_version: u32,
    pub documents: Vec<Document>,
}

impl CorpusManifest {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn new(documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::EmptyDocument);
        }
        Ok(CorpusManifest { format_version: Self::FORMAT_VERSION, documents })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Md,
    Jsonl,
}

impl std::str::FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(SourceFormat::Md),
            "jsonl" => Ok(SourceFormat::Jsonl),
            other => Err(Error::Invalid(format!(
                "unknown source format {other:?}; expected md or jsonl"
            ))),
        }
    }
}

/// Parent of a paragraph in the heading hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parent {
    Document,
    Paragraph(usize),
}

fn parse_md(source: &str) -> Result<Vec<(String, u32)>> {
    let mut units = Vec::new();
    let mut governing = 0u32;
    let mut run: Vec<&str> = Vec::new();
    let flush = |run: &mut Vec<&str>, units: &mut Vec<(String, u32)>, plevel: u32| {
        if !run.is_empty() {
            units.push((run.join("\n"), plevel));
            run.clear();
        }
    };
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            flush(&mut run, &mut units, governing);
            continue;
        }
        if line.starts_with('#') {
            flush(&mut run, &mut units, governing);
            let hashes = line.chars().take_while(|c| *c == '#').count();
            if hashes > 6 {
                return Err(Error::format(
                    lineno,
                    format!("heading marker has {hashes} '#' characters; at most 6 allowed"),
                ));
            }
            let rest = line[hashes..].strip_prefix(' ').ok_or_else(|| {
                Error::format(lineno, "heading marker must be followed by a space")
            })?;
            let title = rest.trim();
            if title.is_empty() {
                return Err(Error::format(lineno, "heading has no title text"));
            }
            governing = (hashes - 1) as u32;
            units.push((title.to_string(), governing));
        } else {
            run.push(line);
        }
    }
    flush(&mut run, &mut units, governing);
    Ok(units)
}

#[derive(Deserialize)]
struct JsonUnit {
    text: String,
    plevel: u32,
}

fn parse_jsonl(source: &str) -> Result<Vec<(String, u32)>> {
    let mut units = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let unit: JsonUnit = serde_json::from_str(line)
            .map_err(|e| Error::format(lineno, format!("invalid paragraph object: {e}")))?;
        if !unit.text.trim().is_empty() {
            units.push((unit.text, unit.plevel));
        }
    }
    Ok(units)
}

pub fn ingest_document(
    source: &str,
    title: &str,
    format: SourceFormat,
) -> Result<IngestedDocument> {
    if title.trim().is_empty() {
        return Err(Error::Invalid("document title must be non-empty".into()));
    }
    let units = match format {
        SourceFormat::Md => parse_md(source)?,
        SourceFormat::Jsonl => parse_jsonl(source)?,
    };
    if units.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let doc_id = NodeId::document(title);
    let paragraphs = units
        .into_iter()
        .enumerate()
        .map(|(ordinal, (text, plevel))| Paragraph {
            para_id: NodeId::paragraph(title, ordinal),
            doc_id: doc_id.clone(),
            ordinal,
            plevel,
            enriched_text: text.clone(),
            text,
        })
        .collect::<Vec<_>>();
    Ok(IngestedDocument {
        document: Document { doc_id, title: title.to_string(), paragraph_count: paragraphs.len() },
        paragraphs,
    })
}

/// Parent ordinal for every position, computed with a monotonic stack:
/// the nearest preceding entry with strictly smaller plevel, `None` when
/// no such entry exists (the paragraph hangs off the document).
pub fn parent_ordinals(plevels: &[u32]) -> Vec<Option<usize>> {
    let mut stack: Vec<usize> = Vec::new();
    let mut parents = Vec::with_capacity(plevels.len());
    for (i, &plevel) in plevels.iter().enumerate() {
        while stack.last().is_some_and(|&top| plevels[top] >= plevel) {
            stack.pop();
        }
        parents.push(stack.last().copied());
        stack.push(i);
    }
    parents
}

impl IngestedDocument {
    pub fn parent_of(&self, ordinal: usize) -> Result<Parent> {
        if ordinal >= self.paragraphs.len() {
            return Err(Error::NotFound(format!(
                "paragraph ordinal {ordinal} not in document {:?}",
                self.document.title
            )));
        }
        let plevel = self.paragraphs[ordinal].plevel;
        let parent = self.paragraphs[..ordinal].iter().rev().find(|p| p.plevel < plevel);
        Ok(match parent {
            Some(p) => Parent::Paragraph(p.ordinal),
            None => Parent::Document,
        })
    }

    pub fn parents(&self) -> Vec<Parent> {
        let plevels: Vec<u32> = self.paragraphs.iter().map(|p| p.plevel).collect();
        parent_ordinals(&plevels)
            .into_iter()
            .map(|p| p.map_or(Parent::Document, Parent::Paragraph))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# PART 1\ntext A\n\n## 1.1\ntext B\n";

    #[test]
    fn heading_and_body_levels() {
        let doc = ingest_document(SAMPLE, "Sample", SourceFormat::Md).unwrap();
        let plevels: Vec<u32> = doc.paragraphs.iter().map(|p| p.plevel).collect();
        let ordinals: Vec<usize> = doc.paragraphs.iter().map(|p| p.ordinal).collect();
        assert_eq!(plevels, vec![0, 0, 1, 1]);
        assert_eq!(ordinals, vec![0, 1, 2, 3]);
        let texts: Vec<&str> = doc.paragraphs.iter().map(|p| p.text.as_str()).collect();
        assert_eq!(texts, vec!["PART 1", "text A", "1.1", "text B"]);
        assert_eq!(doc.document.paragraph_count, 4);
    }

    #[test]
    fn single_body_line() {
        let doc = ingest_document("hello", "T", SourceFormat::Md).unwrap();
        assert_eq!(doc.paragraphs.len(), 1);
        assert_eq!(doc.paragraphs[0].plevel, 0);
        assert_eq!(doc.paragraphs[0].ordinal, 0);
        assert_eq!(doc.paragraphs[0].text, "hello");
    }

    #[test]
    fn blank_source_is_an_error() {
        let err = ingest_document("\n  \n\n", "T", SourceFormat::Md).unwrap_err();
        assert!(matches!(err, Error::EmptyDocument));
    }

    #[test]
    fn multiline_body_units_join_on_newline() {
        let doc =
            ingest_document("# H\nline one\nline two\n\nlast", "T", SourceFormat::Md).unwrap();
        let texts: Vec<&str> = doc.paragraphs.iter().map(|p| p.text.as_str()).collect();
        assert_eq!(texts, vec!["H", "line one\nline two", "last"]);
    }

    #[test]
    fn malformed_headings_name_the_line() {
        let err = ingest_document("ok\n####### deep", "T", SourceFormat::Md).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }), "{err}");
        let err = ingest_document("#missing", "T", SourceFormat::Md).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }), "{err}");
        let err = ingest_document("#  \n", "T", SourceFormat::Md).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }), "{err}");
    }

    #[test]
    fn jsonl_units() {
        let src = "{\"text\":\"A\",\"plevel\":0}\n\n{\"text\":\"B\",\"plevel\":2}\n";
        let doc = ingest_document(src, "T", SourceFormat::Jsonl).unwrap();
        assert_eq!(doc.paragraphs.len(), 2);
        assert_eq!(doc.paragraphs[1].plevel, 2);
        let err = ingest_document("{\"plevel\":0}", "T", SourceFormat::Jsonl).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
    }

    #[test]
    fn parent_resolution() {
        let src = "{\"text\":\"a\",\"plevel\":0}\n{\"text\":\"b\",\"plevel\":1}\n\
                   {\"text\":\"c\",\"plevel\":1}\n{\"text\":\"d\",\"plevel\":2}";
        let doc = ingest_document(src, "T", SourceFormat::Jsonl).unwrap();
        assert_eq!(doc.parent_of(3).unwrap(), Parent::Paragraph(2));
        assert_eq!(doc.parent_of(0).unwrap(), Parent::Document);
        assert!(doc.parent_of(9).is_err());

        let src = "{\"text\":\"a\",\"plevel\":0}\n{\"text\":\"b\",\"plevel\":1}\n\
                   {\"text\":\"c\",\"plevel\":0}";
        let doc = ingest_document(src, "T", SourceFormat::Jsonl).unwrap();
        assert_eq!(doc.parent_of(2).unwrap(), Parent::Document);
        assert_eq!(doc.parents(), vec![Parent::Document, Parent::Paragraph(0), Parent::Document]);
    }

    #[test]
    fn reingestion_is_deterministic() {
        let a = ingest_document(SAMPLE, "Sample", SourceFormat::Md).unwrap();
        let b = ingest_document(SAMPLE, "Sample", SourceFormat::Md).unwrap();
        assert_eq!(a, b);
        assert_ne!(
            a.paragraphs[0].para_id, a.paragraphs[1].para_id,
            "ordinals must separate paragraph ids"
        );
    }
}
