//! Line-JSON stage artifacts. Every intermediate file carries one JSON
//! record per line so each stage can be run, inspected, and tested on its
//! own. Writes go through a temp file and rename, so a failed stage never
//! leaves a partial artifact behind.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use regkg_core::linker::{Tag, TagOccur};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Output of the linking stage: canonical tags first, then occurrences,
/// both in creation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LinkedRecord {
    Tag(Tag),
    Occur(TagOccur),
}

pub fn split_linked(records: Vec<LinkedRecord>) -> (Vec<Tag>, Vec<TagOccur>) {
    let mut tags = Vec::new();
    let mut occurrences = Vec::new();
    for record in records {
        match record {
            LinkedRecord::Tag(t) => tags.push(t),
            LinkedRecord::Occur(o) => occurrences.push(o),
        }
    }
    (tags, occurrences)
}

pub fn write_lines<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let src =
        fs::read_to_string(path).with_context(|| format!("reading artifact {}", path.display()))?;
    let mut records = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad record", path.display(), idx + 1))?;
        records.push(record);
    }
    Ok(records)
}

/// Write via a sibling temp file and rename, creating parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use regkg_core::ids::NodeId;
    use regkg_core::taxonomy::TagType;

    #[test]
    fn linked_records_round_trip() {
        let tag =
            Tag { tag_id: NodeId::tag("PROD", "fund"), ttype: TagType::Prod, lemma: "fund".into() };
        let occur = TagOccur {
            occur_id: NodeId::raw("o1"),
            para_id: NodeId::paragraph("T", 0),
            ttype: TagType::Prod,
            start: 4,
            end: 8,
            text: "fund".into(),
            linked_tag: tag.tag_id.clone(),
        };
        let records = vec![LinkedRecord::Tag(tag.clone()), LinkedRecord::Occur(occur.clone())];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("linked.jsonl");
        write_lines(&path, &records).unwrap();
        let back: Vec<LinkedRecord> = read_lines(&path).unwrap();
        assert_eq!(back, records);
        let (tags, occurrences) = split_linked(back);
        assert_eq!(tags, vec![tag]);
        assert_eq!(occurrences, vec![occur]);
    }

    #[test]
    fn read_reports_bad_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.jsonl");
        let good = "{\"record\":\"tag\",\"tag_id\":\"t1\",\"ttype\":\"PROD\",\"lemma\":\"fund\"}";
        fs::write(&path, format!("{good}\nnot json\n")).unwrap();
        let err = read_lines::<LinkedRecord>(&path).unwrap_err();
        assert!(err.to_string().contains(":2"), "{err}");
    }

    #[test]
    fn atomic_write_creates_parents_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/out.jsonl");
        write_atomic(&path, b"x\n").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"x\n");
        assert!(!path.with_extension("jsonl.tmp").exists());
    }
}
