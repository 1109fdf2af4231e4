//! In-memory property graph: four node kinds, structural edges (NEXT,
//! SOURCE, OCCUR) plus relation-labeled edges, with schema validation,
//! census, and traversal. Node and edge insertion order is preserved and
//! is the order used by persistence and exports.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{IngestedDocument, Parent};
use crate::error::{Error, Result};
use crate::ids::NodeId;
use crate::linker::{Tag, TagOccur};
use crate::relations::{RelationEdge, RelationLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Document,
    Paragraph,
    Tag,
    TagOccur,
}

impl NodeKind {
    pub fn code(self) -> &'static str {
        match self {
            NodeKind::Document => "Document",
            NodeKind::Paragraph => "Paragraph",
            NodeKind::Tag => "Tag",
            NodeKind::TagOccur => "TagOccur",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Next,
    Source,
    Occur,
    Relation(RelationLabel),
}

impl EdgeKind {
    pub fn code(self) -> &'static str {
        match self {
            EdgeKind::Next => "NEXT",
            EdgeKind::Source => "SOURCE",
            EdgeKind::Occur => "OCCUR",
            EdgeKind::Relation(label) => label.code(),
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NEXT" => Ok(EdgeKind::Next),
            "SOURCE" => Ok(EdgeKind::Source),
            "OCCUR" => Ok(EdgeKind::Occur),
            other => other.parse::<RelationLabel>().map(EdgeKind::Relation),
        }
    }
}

impl Serialize for EdgeKind {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for EdgeKind {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub props: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
    pub props: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyGraph {
    nodes: IndexMap<NodeId, Node>,
    edges: Vec<Edge>,
    out_adj: HashMap<NodeId, Vec<usize>>,
    in_adj: HashMap<NodeId, Vec<usize>>,
}

/// Exact node/edge counts, broken down by kind and by Tag concept type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCensus {
    pub nodes_total: usize,
    pub edges_total: usize,
    pub node_kinds: BTreeMap<String, usize>,
    pub edge_kinds: BTreeMap<String, usize>,
    pub tag_types: BTreeMap<String, usize>,
}

impl PropertyGraph {
    pub fn new() -> PropertyGraph {
        PropertyGraph::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    /// Nodes in insertion order.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &Node)> {
        self.nodes.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn add_node(
        &mut self,
        id: NodeId,
        kind: NodeKind,
        props: BTreeMap<String, Value>,
    ) -> Result<()> {
        if self.nodes.contains_key(&id) {
            return Err(Error::Integrity(format!("duplicate node id {id}")));
        }
        self.nodes.insert(id, Node { kind, props });
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        kind: EdgeKind,
        props: BTreeMap<String, Value>,
    ) -> Result<()> {
        for endpoint in [&src, &dst] {
            if !self.nodes.contains_key(endpoint) {
                return Err(Error::Integrity(format!(
                    "{kind} edge references missing node {endpoint}"
                )));
            }
        }
        let idx = self.edges.len();
        self.out_adj.entry(src.clone()).or_default().push(idx);
        self.in_adj.entry(dst.clone()).or_default().push(idx);
        self.edges.push(Edge { src, dst, kind, props });
        Ok(())
    }

    fn edge_indexes(&self, id: &NodeId, direction: Direction) -> Vec<usize> {
        let mut idxs = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            idxs.extend(self.out_adj.get(id).into_iter().flatten().copied());
        }
        if matches!(direction, Direction::In | Direction::Both) {
            idxs.extend(self.in_adj.get(id).into_iter().flatten().copied());
        }
        idxs.sort_unstable();
        idxs.dedup();
        idxs
    }

    /// Adjacent node ids in edge insertion order, optionally restricted to
    /// one edge kind.
    pub fn neighbors(
        &self,
        id: &NodeId,
        kind: Option<EdgeKind>,
        direction: Direction,
    ) -> Result<Vec<NodeId>> {
        if !self.nodes.contains_key(id) {
            return Err(Error::NotFound(format!("node {id} not in graph")));
        }
        let mut out = Vec::new();
        for idx in self.edge_indexes(id, direction) {
            let edge = &self.edges[idx];
            if kind.is_some_and(|k| k != edge.kind) {
                continue;
            }
            let other = if edge.src == *id { &edge.dst } else { &edge.src };
            out.push(other.clone());
        }
        Ok(out)
    }

    /// Edges incident to `id`, same ordering contract as `neighbors`.
    pub fn incident_edges(&self, id: &NodeId, direction: Direction) -> Vec<&Edge> {
        self.edge_indexes(id, direction).into_iter().map(|i| &self.edges[i]).collect()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = (&NodeId, &Node)> {
        self.nodes.iter().filter(move |(_, n)| n.kind == kind)
    }

    /// Remove the given nodes and every incident edge. Returns the number
    /// of nodes and edges removed.
    pub fn remove_nodes(&mut self, ids: &BTreeSet<NodeId>) -> (usize, usize) {
        let before_nodes = self.nodes.len();
        let before_edges = self.edges.len();
        self.nodes.retain(|id, _| !ids.contains(id));
        self.edges.retain(|e| !ids.contains(&e.src) && !ids.contains(&e.dst));
        self.rebuild_adjacency();
        (before_nodes - self.nodes.len(), before_edges - self.edges.len())
    }

    fn rebuild_adjacency(&mut self) {
        self.out_adj.clear();
        self.in_adj.clear();
        for (idx, edge) in self.edges.iter().enumerate() {
            self.out_adj.entry(edge.src.clone()).or_default().push(idx);
            self.in_adj.entry(edge.dst.clone()).or_default().push(idx);
        }
    }

    fn kind_of(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    /// One-pass schema check of every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let mut next_out: HashMap<&NodeId, usize> = HashMap::new();
        let mut source_out: HashMap<&NodeId, usize> = HashMap::new();
        let mut occur_in: HashMap<&NodeId, usize> = HashMap::new();
        for edge in &self.edges {
            let (src_kind, dst_kind) = match (self.kind_of(&edge.src), self.kind_of(&edge.dst)) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    return Err(Error::Integrity(format!(
                        "{} edge {} -> {} references a missing node",
                        edge.kind, edge.src, edge.dst
                    )))
                }
            };
            match edge.kind {
                EdgeKind::Next => {
                    if src_kind != NodeKind::Paragraph
                        || !matches!(dst_kind, NodeKind::Paragraph | NodeKind::Document)
                    {
                        return Err(Error::Integrity(format!(
                            "NEXT edge {} -> {} must run Paragraph -> Paragraph|Document",
                            edge.src, edge.dst
                        )));
                    }
                    *next_out.entry(&edge.src).or_default() += 1;
                }
                EdgeKind::Source => {
                    if src_kind != NodeKind::TagOccur || dst_kind != NodeKind::Paragraph {
                        return Err(Error::Integrity(format!(
                            "SOURCE edge {} -> {} must run TagOccur -> Paragraph",
                            edge.src, edge.dst
                        )));
                    }
                    *source_out.entry(&edge.src).or_default() += 1;
                }
                EdgeKind::Occur => {
                    if src_kind != NodeKind::Tag || dst_kind != NodeKind::TagOccur {
                        return Err(Error::Integrity(format!(
                            "OCCUR edge {} -> {} must run Tag -> TagOccur",
                            edge.src, edge.dst
                        )));
                    }
                    *occur_in.entry(&edge.dst).or_default() += 1;
                }
                EdgeKind::Relation(_) => {
                    if src_kind != NodeKind::TagOccur || dst_kind != NodeKind::TagOccur {
                        return Err(Error::Integrity(format!(
                            "{} edge {} -> {} must run TagOccur -> TagOccur",
                            edge.kind, edge.src, edge.dst
                        )));
                    }
                    if edge.src == edge.dst {
                        return Err(Error::Integrity(format!(
                            "relation self-loop on {}",
                            edge.src
                        )));
                    }
                }
            }
        }
        for (id, node) in &self.nodes {
            match node.kind {
                NodeKind::Paragraph => {
                    if next_out.get(id).copied().unwrap_or(0) != 1 {
                        return Err(Error::Integrity(format!(
                            "paragraph {id} must have exactly one outgoing NEXT edge"
                        )));
                    }
                }
                NodeKind::TagOccur => {
                    if source_out.get(id).copied().unwrap_or(0) != 1 {
                        return Err(Error::Integrity(format!(
                            "occurrence {id} must have exactly one SOURCE edge"
                        )));
                    }
                    if occur_in.get(id).copied().unwrap_or(0) != 1 {
                        return Err(Error::Integrity(format!(
                            "occurrence {id} must have exactly one incoming OCCUR edge"
                        )));
                    }
                }
                NodeKind::Document | NodeKind::Tag => {}
            }
        }
        self.check_next_acyclic()
    }

    fn check_next_acyclic(&self) -> Result<()> {
        let mut parent: HashMap<&NodeId, &NodeId> = HashMap::new();
        for edge in &self.edges {
            if edge.kind == EdgeKind::Next {
                parent.insert(&edge.src, &edge.dst);
            }
        }
        for start in parent.keys() {
            let mut cursor = *start;
            let mut steps = 0;
            while let Some(next) = parent.get(cursor) {
                cursor = next;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(Error::Integrity(format!(
                        "NEXT edges form a cycle reachable from {start}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn census(&self) -> GraphCensus {
        let mut node_kinds: BTreeMap<String, usize> = BTreeMap::new();
        let mut edge_kinds: BTreeMap<String, usize> = BTreeMap::new();
        let mut tag_types: BTreeMap<String, usize> = BTreeMap::new();
        for (_, node) in &self.nodes {
            *node_kinds.entry(node.kind.code().to_string()).or_default() += 1;
            if node.kind == NodeKind::Tag {
                if let Some(Value::String(t)) = node.props.get("ttype") {
                    *tag_types.entry(t.clone()).or_default() += 1;
                }
            }
        }
        for edge in &self.edges {
            *edge_kinds.entry(edge.kind.code().to_string()).or_default() += 1;
        }
        GraphCensus {
            nodes_total: self.nodes.len(),
            edges_total: self.edges.len(),
            node_kinds,
            edge_kinds,
            tag_types,
        }
    }
}

fn stru(s: &str) -> Value {
    Value::String(s.to_string())
}

/// Assemble the full graph from the pipeline outputs. Every reference is
/// checked; a dangling one aborts with the offending id.
pub fn build_graph(
    documents: &[IngestedDocument],
    tags: &[Tag],
    occurrences: &[TagOccur],
    relations: &[RelationEdge],
) -> Result<PropertyGraph> {
    let mut graph = PropertyGraph::new();
    for doc in documents {
        let mut props = BTreeMap::new();
        props.insert("title".to_string(), stru(&doc.document.title));
        graph.add_node(doc.document.doc_id.clone(), NodeKind::Document, props)?;
        for para in &doc.paragraphs {
            let mut props = BTreeMap::new();
            props.insert("plevel".to_string(), Value::from(para.plevel));
            props.insert("ordinal".to_string(), Value::from(para.ordinal as u64));
            props.insert("text".to_string(), stru(&para.text));
            if para.enriched_text != para.text {
                props.insert("enriched_text".to_string(), stru(&para.enriched_text));
            }
            graph.add_node(para.para_id.clone(), NodeKind::Paragraph, props)?;
        }
        for (para, parent) in doc.paragraphs.iter().zip(doc.parents()) {
            let dst = match parent {
                Parent::Document => doc.document.doc_id.clone(),
                Parent::Paragraph(ordinal) => doc.paragraphs[ordinal].para_id.clone(),
            };
            graph.add_edge(para.para_id.clone(), dst, EdgeKind::Next, BTreeMap::new())?;
        }
    }
    for tag in tags {
        let mut props = BTreeMap::new();
        props.insert("ttype".to_string(), stru(tag.ttype.code()));
        props.insert("lemma".to_string(), stru(&tag.lemma));
        graph.add_node(tag.tag_id.clone(), NodeKind::Tag, props)?;
    }
    for occ in occurrences {
        let mut props = BTreeMap::new();
        props.insert("ttype".to_string(), stru(occ.ttype.code()));
        props.insert("text".to_string(), stru(&occ.text));
        props.insert("start".to_string(), Value::from(occ.start as u64));
        props.insert("end".to_string(), Value::from(occ.end as u64));
        graph.add_node(occ.occur_id.clone(), NodeKind::TagOccur, props)?;
        graph.add_edge(
            occ.occur_id.clone(),
            occ.para_id.clone(),
            EdgeKind::Source,
            BTreeMap::new(),
        )?;
        graph.add_edge(
            occ.linked_tag.clone(),
            occ.occur_id.clone(),
            EdgeKind::Occur,
            BTreeMap::new(),
        )?;
    }
    for rel in relations {
        let mut props = BTreeMap::new();
        if let Some(trigger) = &rel.trigger {
            props.insert("trigger".to_string(), stru(trigger));
        }
        props.insert("sentence_start".to_string(), Value::from(rel.sentence_start as u64));
        props.insert("sentence_end".to_string(), Value::from(rel.sentence_end as u64));
        graph.add_edge(rel.src.clone(), rel.dst.clone(), EdgeKind::Relation(rel.label), props)?;
    }
    graph.validate()?;
    Ok(graph)
}
