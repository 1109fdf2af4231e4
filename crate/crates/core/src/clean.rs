//! Degenerate-tag cleanup. Linking keeps tags whose normalized lemma is
//! empty or near-empty; these group unrelated surfaces (list markers,
//! stray conjunctions) under one node and pollute traversals. This module
//! finds them for inspection and deletes them with exact accounting.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Direction, EdgeKind, NodeKind, PropertyGraph};
use crate::ids::NodeId;

fn lemma_of(graph: &PropertyGraph, tag_id: &NodeId) -> String {
    graph
        .node(tag_id)
        .and_then(|n| n.props.get("lemma"))
        .and_then(|v| v.as_str())
        .unwrap_or("")
        .to_string()
}

fn short_lemma_tags(graph: &PropertyGraph, max_lemma_len: usize) -> Vec<NodeId> {
    graph
        .nodes_of_kind(NodeKind::Tag)
        .filter(|(id, _)| lemma_of(graph, id).chars().count() <= max_lemma_len)
        .map(|(id, _)| id.clone())
        .collect()
}

/// Surface texts of occurrences linked to short-lemma tags, with counts,
/// sorted by count descending then text ascending.
pub fn find_degenerate(graph: &PropertyGraph, max_lemma_len: usize) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for tag_id in short_lemma_tags(graph, max_lemma_len) {
        let occs =
            graph.neighbors(&tag_id, Some(EdgeKind::Occur), Direction::Out).unwrap_or_default();
        for occ in occs {
            let text = graph
                .node(&occ)
                .and_then(|n| n.props.get("text"))
                .and_then(|v| v.as_str())
                .unwrap_or("")
                .to_string();
            *counts.entry(text).or_default() += 1;
        }
    }
    let mut rows: Vec<(String, usize)> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

/// Delete every short-lemma Tag, all its occurrences, and every edge
/// incident to a deleted node. Returns (nodes_deleted, edges_deleted).
pub fn clean_degenerate(graph: &mut PropertyGraph, max_lemma_len: usize) -> (usize, usize) {
    let mut doomed: BTreeSet<NodeId> = BTreeSet::new();
    for tag_id in short_lemma_tags(graph, max_lemma_len) {
        let occs =
            graph.neighbors(&tag_id, Some(EdgeKind::Occur), Direction::Out).unwrap_or_default();
        doomed.insert(tag_id);
        doomed.extend(occs);
    }
    graph.remove_nodes(&doomed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::RelationLabel;
    use serde_json::Value;

    fn tag_props(lemma: &str) -> BTreeMap<String, Value> {
        let mut props = BTreeMap::new();
        props.insert("ttype".to_string(), Value::String("ENT".into()));
        props.insert("lemma".to_string(), Value::String(lemma.into()));
        props
    }

    fn occ_props(text: &str) -> BTreeMap<String, Value> {
        let mut props = BTreeMap::new();
        props.insert("text".to_string(), Value::String(text.into()));
        props
    }

    /// 3 empty-lemma Tags with 10 occurrences between them, plus one tag
    /// worth keeping. Incident edges on the doomed set: 10 SOURCE,
    /// 10 OCCUR, 5 relation edges (one of them doomed-to-doomed, which
    /// still counts once).
    fn fixture() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        g.add_node(NodeId::raw("doc"), NodeKind::Document, BTreeMap::new()).unwrap();
        g.add_node(NodeId::raw("para"), NodeKind::Paragraph, BTreeMap::new()).unwrap();
        g.add_edge(NodeId::raw("para"), NodeId::raw("doc"), EdgeKind::Next, BTreeMap::new())
            .unwrap();
        for t in ["t1", "t2", "t3"] {
            g.add_node(NodeId::raw(t), NodeKind::Tag, tag_props("")).unwrap();
        }
        g.add_node(NodeId::raw("tk"), NodeKind::Tag, tag_props("risk")).unwrap();
        let owners = [
            ("o1", "t1", "unless"),
            ("o2", "t1", "unless"),
            ("o3", "t1", "c)"),
            ("o4", "t1", "unless"),
            ("o5", "t2", "if the"),
            ("o6", "t2", "if the"),
            ("o7", "t2", "c)"),
            ("o8", "t3", "and"),
            ("o9", "t3", "and"),
            ("o10", "t3", "c)"),
        ];
        for (occ, tag, text) in owners {
            g.add_node(NodeId::raw(occ), NodeKind::TagOccur, occ_props(text)).unwrap();
            g.add_edge(NodeId::raw(occ), NodeId::raw("para"), EdgeKind::Source, BTreeMap::new())
                .unwrap();
            g.add_edge(NodeId::raw(tag), NodeId::raw(occ), EdgeKind::Occur, BTreeMap::new())
                .unwrap();
        }
        g.add_node(NodeId::raw("ok"), NodeKind::TagOccur, occ_props("risk")).unwrap();
        g.add_edge(NodeId::raw("ok"), NodeId::raw("para"), EdgeKind::Source, BTreeMap::new())
            .unwrap();
        g.add_edge(NodeId::raw("tk"), NodeId::raw("ok"), EdgeKind::Occur, BTreeMap::new()).unwrap();
        let rel = EdgeKind::Relation(RelationLabel::Unclassified);
        for (src, dst) in [("o1", "ok"), ("ok", "o2"), ("o3", "o4"), ("o5", "ok"), ("o8", "ok")] {
            g.add_edge(NodeId::raw(src), NodeId::raw(dst), rel, BTreeMap::new()).unwrap();
        }
        g.validate().unwrap();
        g
    }

    #[test]
    fn find_orders_by_count_then_text() {
        let g = fixture();
        let rows = find_degenerate(&g, 1);
        assert_eq!(
            rows,
            vec![
                ("c)".to_string(), 3),
                ("unless".to_string(), 3),
                ("and".to_string(), 2),
                ("if the".to_string(), 2),
            ]
        );
        assert!(find_degenerate(&g, 0).len() == rows.len(), "empty lemmas match len 0 too");
    }

    #[test]
    fn clean_deletes_enumerated_counts() {
        let mut g = fixture();
        let before = g.census();
        let (nodes, edges) = clean_degenerate(&mut g, 1);
        assert_eq!((nodes, edges), (13, 25));
        let after = g.census();
        assert_eq!(after.nodes_total, before.nodes_total - nodes);
        assert_eq!(after.edges_total, before.edges_total - edges);
        g.validate().unwrap();
        assert!(short_lemma_tags(&g, 1).is_empty());
        assert_eq!(g.census().tag_types["ENT"], 1);
    }

    #[test]
    fn clean_is_idempotent() {
        let mut g = fixture();
        clean_degenerate(&mut g, 1);
        assert_eq!(clean_degenerate(&mut g, 1), (0, 0));
    }

    #[test]
    fn clean_on_clean_graph_is_noop() {
        let mut g = PropertyGraph::new();
        g.add_node(NodeId::raw("t"), NodeKind::Tag, tag_props("rulebook")).unwrap();
        assert_eq!(clean_degenerate(&mut g, 1), (0, 0));
        assert!(find_degenerate(&g, 1).is_empty());
    }
}
