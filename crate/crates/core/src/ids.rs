//! Content-addressed node identifiers.
//!
//! Every node id is derived from the content that defines the node, so
//! re-running a pipeline over identical inputs reproduces identical ids
//! and byte-identical dumps. Ids carry a short kind prefix to keep dumps
//! and query output readable.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Identifier of any graph node (document, paragraph, tag, occurrence).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    fn derive(prefix: &str, material: &[&str]) -> NodeId {
        let mut hasher = Sha256::new();
        for part in material {
            hasher.update(part.as_bytes());
            hasher.update([0u8]);
        }
        let digest = hasher.finalize();
        NodeId(format!("{prefix}:{}", hex::encode(&digest[..8])))
    }

    pub fn document(title: &str) -> NodeId {
        NodeId::derive("doc", &[title])
    }

    pub fn paragraph(doc_title: &str, ordinal: usize) -> NodeId {
        NodeId::derive("par", &[doc_title, &ordinal.to_string()])
    }

    pub fn tag(ttype: &str, lemma: &str) -> NodeId {
        NodeId::derive("tag", &[ttype, lemma])
    }

    pub fn occurrence(para: &NodeId, ttype: &str, start: usize, end: usize) -> NodeId {
        NodeId::derive("occ", &[&para.0, ttype, &start.to_string(), &end.to_string()])
    }

    /// Wrap an externally supplied id (dump import, tests).
    pub fn raw(id: impl Into<String>) -> NodeId {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
