//! Analytical queries over a built graph: document intersection by
//! concept, table-of-contents assembly, tag usage joins, bounded
//! undirected shortest paths, and corpus statistics.
//!
//! All operations are read-only and deterministic; result ordering is
//! part of each contract so serialized output is reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Direction, EdgeKind, Node, NodeKind, PropertyGraph};
use crate::ids::NodeId;
use crate::taxonomy::TagType;

fn prop_str<'a>(node: &'a Node, key: &str) -> &'a str {
    node.props.get(key).and_then(|v| v.as_str()).unwrap_or("")
}

fn prop_u64(node: &Node, key: &str) -> u64 {
    node.props.get(key).and_then(|v| v.as_u64()).unwrap_or(0)
}

/// Paragraph text is the enriched form when enrichment changed it.
fn paragraph_text(node: &Node) -> &str {
    let enriched = prop_str(node, "enriched_text");
    if enriched.is_empty() {
        prop_str(node, "text")
    } else {
        enriched
    }
}

/// Follow the NEXT chain from a paragraph up to its Document.
fn document_of(
    graph: &PropertyGraph,
    para_id: &NodeId,
    memo: &mut HashMap<NodeId, Option<NodeId>>,
) -> Option<NodeId> {
    if let Some(hit) = memo.get(para_id) {
        return hit.clone();
    }
    let mut trail = vec![para_id.clone()];
    let mut cursor = para_id.clone();
    let answer = loop {
        match graph.node(&cursor).map(|n| n.kind) {
            Some(NodeKind::Document) => break Some(cursor.clone()),
            Some(NodeKind::Paragraph) => {}
            _ => break None,
        }
        let parents =
            graph.neighbors(&cursor, Some(EdgeKind::Next), Direction::Out).unwrap_or_default();
        match parents.into_iter().next() {
            Some(next) if !trail.contains(&next) => {
                trail.push(next.clone());
                cursor = next;
            }
            _ => break None,
        }
    };
    for id in trail {
        memo.insert(id, answer.clone());
    }
    answer
}

fn source_paragraph(graph: &PropertyGraph, occ_id: &NodeId) -> Option<NodeId> {
    graph.neighbors(occ_id, Some(EdgeKind::Source), Direction::Out).ok()?.into_iter().next()
}

fn owning_tag(graph: &PropertyGraph, occ_id: &NodeId) -> Option<NodeId> {
    graph.neighbors(occ_id, Some(EdgeKind::Occur), Direction::In).ok()?.into_iter().next()
}

/// Documents whose title contains `substr`, in insertion order.
pub fn matching_documents(graph: &PropertyGraph, substr: &str) -> Vec<(NodeId, String)> {
    graph
        .nodes_of_kind(NodeKind::Document)
        .filter(|(_, n)| prop_str(n, "title").contains(substr))
        .map(|(id, n)| (id.clone(), prop_str(n, "title").to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceRef {
    pub occur_id: NodeId,
    pub para_id: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionResult {
    pub tag_id: NodeId,
    pub lemma: String,
    pub left_occurrences: Vec<OccurrenceRef>,
    pub right_occurrences: Vec<OccurrenceRef>,
}

/// Tags of `ttype` occurring in at least one document matching each title
/// substring, ordered by lemma, truncated at `limit`.
pub fn intersect_documents(
    graph: &PropertyGraph,
    ttype: TagType,
    left_title_substr: &str,
    right_title_substr: &str,
    limit: usize,
) -> Result<Vec<IntersectionResult>> {
    let left_docs: BTreeSet<NodeId> =
        matching_documents(graph, left_title_substr).into_iter().map(|(id, _)| id).collect();
    if left_docs.is_empty() {
        return Err(Error::NotFound(format!(
            "left side: no document title contains {left_title_substr:?}"
        )));
    }
    let right_docs: BTreeSet<NodeId> =
        matching_documents(graph, right_title_substr).into_iter().map(|(id, _)| id).collect();
    if right_docs.is_empty() {
        return Err(Error::NotFound(format!(
            "right side: no document title contains {right_title_substr:?}"
        )));
    }
    let mut memo = HashMap::new();
    let mut results = Vec::new();
    for (tag_id, tag) in graph.nodes_of_kind(NodeKind::Tag) {
        if prop_str(tag, "ttype") != ttype.code() {
            continue;
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        let occs =
            graph.neighbors(tag_id, Some(EdgeKind::Occur), Direction::Out).unwrap_or_default();
        for occ in occs {
            let Some(para) = source_paragraph(graph, &occ) else { continue };
            let Some(doc) = document_of(graph, &para, &mut memo) else { continue };
            let reference = OccurrenceRef { occur_id: occ, para_id: para };
            if left_docs.contains(&doc) {
                left.push(reference.clone());
            }
            if right_docs.contains(&doc) {
                right.push(reference);
            }
        }
        if !left.is_empty() && !right.is_empty() {
            results.push(IntersectionResult {
                tag_id: tag_id.clone(),
                lemma: prop_str(tag, "lemma").to_string(),
                left_occurrences: left,
                right_occurrences: right,
            });
        }
    }
    results.sort_by(|a, b| a.lemma.cmp(&b.lemma).then_with(|| a.tag_id.cmp(&b.tag_id)));
    results.truncate(limit);
    Ok(results)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocEntry {
    pub ordinal: u64,
    pub plevel: u64,
    pub text: String,
    pub children: Vec<TocEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableOfContents {
    pub doc_id: NodeId,
    pub document: String,
    pub entries: Vec<TocEntry>,
}

fn paragraphs_of_document(
    graph: &PropertyGraph,
    doc_id: &NodeId,
) -> Vec<(u64, u64, String, NodeId)> {
    let mut memo = HashMap::new();
    let mut paras: Vec<(u64, u64, String, NodeId)> = graph
        .nodes_of_kind(NodeKind::Paragraph)
        .filter(|(id, _)| document_of(graph, id, &mut memo).as_ref() == Some(doc_id))
        .map(|(id, n)| {
            (
                prop_u64(n, "ordinal"),
                prop_u64(n, "plevel"),
                prop_str(n, "text").to_string(),
                id.clone(),
            )
        })
        .collect();
    paras.sort_by_key(|p| p.0);
    paras
}

/// Group an ordinal-ordered run of (ordinal, plevel, text) under the
/// nearest preceding strictly smaller plevel.
fn nest_entries(items: &[(u64, u64, String)]) -> Vec<TocEntry> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let (ordinal, plevel, ref text) = items[i];
        let mut j = i + 1;
        while j < items.len() && items[j].1 > plevel {
            j += 1;
        }
        out.push(TocEntry {
            ordinal,
            plevel,
            text: text.clone(),
            children: nest_entries(&items[i + 1..j]),
        });
        i = j;
    }
    out
}

/// Heading tree of the single document whose title contains
/// `title_substr`, restricted to paragraphs with plevel ≤ `max_plevel`.
pub fn table_of_contents(
    graph: &PropertyGraph,
    title_substr: &str,
    max_plevel: u64,
) -> Result<TableOfContents> {
    let matches = matching_documents(graph, title_substr);
    if matches.is_empty() {
        return Err(Error::NotFound(format!("no document title contains {title_substr:?}")));
    }
    if matches.len() > 1 {
        return Err(Error::Ambiguous {
            pattern: title_substr.to_string(),
            candidates: matches.into_iter().map(|(_, t)| t).collect(),
        });
    }
    let (doc_id, title) = matches.into_iter().next().expect("one match");
    let items: Vec<(u64, u64, String)> = paragraphs_of_document(graph, &doc_id)
        .into_iter()
        .filter(|(_, plevel, _, _)| *plevel <= max_plevel)
        .map(|(ordinal, plevel, text, _)| (ordinal, plevel, text))
        .collect();
    Ok(TableOfContents { doc_id, document: title, entries: nest_entries(&items) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LemmaPredicate {
    Exact { lemma: String },
    ContainsAll { terms: Vec<String> },
}

impl LemmaPredicate {
    pub fn matches(&self, lemma: &str) -> bool {
        match self {
            LemmaPredicate::Exact { lemma: wanted } => lemma == wanted,
            LemmaPredicate::ContainsAll { terms } => {
                terms.iter().all(|t| lemma.contains(t.as_str()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageRow {
    pub tag_id: NodeId,
    pub lemma: String,
    pub occur_id: NodeId,
    pub occurrence_text: String,
    pub occurrence_start: u64,
    pub occurrence_end: u64,
    pub para_id: NodeId,
    pub paragraph_ordinal: u64,
    pub paragraph_text: String,
    pub doc_id: NodeId,
    pub document_title: String,
}

/// Every occurrence of every Tag of `ttype` whose lemma satisfies the
/// predicate, joined to its paragraph and document, ordered by
/// (document title, paragraph ordinal, occurrence start).
pub fn tag_usage(
    graph: &PropertyGraph,
    ttype: TagType,
    predicate: &LemmaPredicate,
) -> Vec<UsageRow> {
    let mut memo = HashMap::new();
    let mut rows = Vec::new();
    for (tag_id, tag) in graph.nodes_of_kind(NodeKind::Tag) {
        if prop_str(tag, "ttype") != ttype.code() {
            continue;
        }
        let lemma = prop_str(tag, "lemma");
        if !predicate.matches(lemma) {
            continue;
        }
        let occs =
            graph.neighbors(tag_id, Some(EdgeKind::Occur), Direction::Out).unwrap_or_default();
        for occ_id in occs {
            let Some(occ) = graph.node(&occ_id) else { continue };
            let Some(para_id) = source_paragraph(graph, &occ_id) else { continue };
            let Some(para) = graph.node(&para_id) else { continue };
            let Some(doc_id) = document_of(graph, &para_id, &mut memo) else { continue };
            let Some(doc) = graph.node(&doc_id) else { continue };
            rows.push(UsageRow {
                tag_id: tag_id.clone(),
                lemma: lemma.to_string(),
                occurrence_text: prop_str(occ, "text").to_string(),
                occurrence_start: prop_u64(occ, "start"),
                occurrence_end: prop_u64(occ, "end"),
                occur_id: occ_id,
                paragraph_ordinal: prop_u64(para, "ordinal"),
                paragraph_text: paragraph_text(para).to_string(),
                para_id,
                document_title: prop_str(doc, "title").to_string(),
                doc_id,
            });
        }
    }
    rows.sort_by(|a, b| {
        (&a.document_title, a.paragraph_ordinal, a.occurrence_start, &a.occur_id).cmp(&(
            &b.document_title,
            b.paragraph_ordinal,
            b.occurrence_start,
            &b.occur_id,
        ))
    });
    rows
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edge_kinds: Vec<EdgeKind>,
    pub length: usize,
}

/// Single shortest undirected path between two nodes, if one exists with
/// at most `max_len` edges. Neighbor expansion is ordered by node id so
/// ties resolve the same way on every run.
fn bfs_path(
    graph: &PropertyGraph,
    src: &NodeId,
    dst: &NodeId,
    max_len: usize,
) -> Option<PathResult> {
    let mut parent: HashMap<NodeId, (NodeId, EdgeKind)> = HashMap::new();
    let mut visited: HashSet<NodeId> = HashSet::from([src.clone()]);
    let mut queue: VecDeque<(NodeId, usize)> = VecDeque::from([(src.clone(), 0)]);
    while let Some((u, depth)) = queue.pop_front() {
        if depth == max_len {
            continue;
        }
        let mut steps: Vec<(NodeId, EdgeKind)> = graph
            .incident_edges(&u, Direction::Both)
            .into_iter()
            .map(|e| {
                let other = if e.src == u { e.dst.clone() } else { e.src.clone() };
                (other, e.kind)
            })
            .collect();
        steps.sort_by(|a, b| a.0.cmp(&b.0));
        for (v, kind) in steps {
            if visited.contains(&v) {
                continue;
            }
            visited.insert(v.clone());
            parent.insert(v.clone(), (u.clone(), kind));
            if v == *dst {
                let mut nodes = vec![v.clone()];
                let mut kinds = Vec::new();
                let mut cursor = v;
                while let Some((prev, k)) = parent.get(&cursor) {
                    kinds.push(*k);
                    nodes.push(prev.clone());
                    cursor = prev.clone();
                }
                nodes.reverse();
                kinds.reverse();
                let length = kinds.len();
                return Some(PathResult { nodes, edge_kinds: kinds, length });
            }
            queue.push_back((v, depth + 1));
        }
    }
    None
}

/// Shortest undirected paths between occurrence nodes whose text contains
/// the source and destination substrings. Pairs are enumerated in
/// (src id, dst id) order; results are truncated at `limit`.
pub fn shortest_paths(
    graph: &PropertyGraph,
    src_contains: &str,
    dst_contains: &str,
    max_len: usize,
    limit: usize,
) -> Result<Vec<PathResult>> {
    if max_len == 0 {
        return Err(Error::Invalid("max_len must be at least 1".to_string()));
    }
    let occurrences: Vec<(&NodeId, &Node)> = graph.nodes_of_kind(NodeKind::TagOccur).collect();
    let srcs: Vec<&NodeId> = occurrences
        .iter()
        .filter(|(_, n)| prop_str(n, "text").contains(src_contains))
        .map(|(id, _)| *id)
        .collect();
    let dsts: Vec<&NodeId> = occurrences
        .iter()
        .filter(|(_, n)| prop_str(n, "text").contains(dst_contains))
        .map(|(id, _)| *id)
        .collect();
    let mut pairs: Vec<(&NodeId, &NodeId)> = Vec::new();
    for s in &srcs {
        for d in &dsts {
            if s != d {
                pairs.push((s, d));
            }
        }
    }
    pairs.sort();
    pairs.dedup();
    let mut results = Vec::new();
    for (s, d) in pairs {
        if results.len() == limit {
            break;
        }
        if let Some(path) = bfs_path(graph, s, d, max_len) {
            results.push(path);
        }
    }
    Ok(results)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagStats {
    pub occurrences_by_ttype: BTreeMap<String, usize>,
    pub tags_by_ttype: BTreeMap<String, usize>,
    pub document_ttype_counts: BTreeMap<String, BTreeMap<String, usize>>,
    pub proportion_ttype: String,
    pub lemma_proportions: BTreeMap<String, BTreeMap<String, f64>>,
    pub cooccurrence: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Corpus-wide tag statistics. `proportion_ttype` selects the concept
/// type whose per-document lemma shares are reported.
pub fn compute_stats(graph: &PropertyGraph, proportion_ttype: TagType) -> TagStats {
    let mut occurrences_by_ttype: BTreeMap<String, usize> =
        TagType::ALL.iter().map(|t| (t.code().to_string(), 0)).collect();
    let mut tags_by_ttype = occurrences_by_ttype.clone();
    let mut cooccurrence: BTreeMap<String, BTreeMap<String, usize>> = TagType::ALL
        .iter()
        .map(|t| {
            (t.code().to_string(), tags_by_ttype.clone().into_keys().map(|k| (k, 0)).collect())
        })
        .collect();
    let mut document_ttype_counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut lemma_counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut para_types: HashMap<NodeId, BTreeSet<String>> = HashMap::new();
    let mut memo = HashMap::new();

    for (occ_id, occ) in graph.nodes_of_kind(NodeKind::TagOccur) {
        let code = prop_str(occ, "ttype").to_string();
        *occurrences_by_ttype.entry(code.clone()).or_default() += 1;
        let Some(para_id) = source_paragraph(graph, occ_id) else { continue };
        para_types.entry(para_id.clone()).or_default().insert(code.clone());
        let Some(doc_id) = document_of(graph, &para_id, &mut memo) else { continue };
        let title =
            graph.node(&doc_id).map(|n| prop_str(n, "title").to_string()).unwrap_or_default();
        *document_ttype_counts
            .entry(title.clone())
            .or_default()
            .entry(code.clone())
            .or_default() += 1;
        if code == proportion_ttype.code() {
            let lemma = owning_tag(graph, occ_id)
                .and_then(|tag_id| graph.node(&tag_id).map(|n| prop_str(n, "lemma").to_string()))
                .unwrap_or_default();
            *lemma_counts.entry(title).or_default().entry(lemma).or_default() += 1;
        }
    }
    for (_, tag) in graph.nodes_of_kind(NodeKind::Tag) {
        *tags_by_ttype.entry(prop_str(tag, "ttype").to_string()).or_default() += 1;
    }
    for types in para_types.values() {
        for a in types {
            for b in types {
                *cooccurrence.entry(a.clone()).or_default().entry(b.clone()).or_default() += 1;
            }
        }
    }
    let lemma_proportions = lemma_counts
        .into_iter()
        .map(|(title, counts)| {
            let total: usize = counts.values().sum();
            let shares =
                counts.into_iter().map(|(lemma, n)| (lemma, n as f64 / total as f64)).collect();
            (title, shares)
        })
        .collect();
    TagStats {
        occurrences_by_ttype,
        tags_by_ttype,
        document_ttype_counts,
        proportion_ttype: proportion_ttype.code().to_string(),
        lemma_proportions,
        cooccurrence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_document, IngestedDocument, SourceFormat};
    use crate::graph::build_graph;
    use crate::linker::link;
    use crate::taggers::SpanTag;

    fn span(
        doc: &IngestedDocument,
        ordinal: usize,
        start: usize,
        end: usize,
        ttype: TagType,
    ) -> SpanTag {
        let para = &doc.paragraphs[ordinal];
        SpanTag {
            para_id: para.para_id.clone(),
            start,
            end,
            ttype,
            surface: para.enriched_text[start..end].to_string(),
            tagger_id: "test".into(),
        }
    }

    fn fixture() -> PropertyGraph {
        let cobs = ingest_document(
            "# Conduct of Business (COBS)\nThe fund must follow the rules.\n## Disclosure\nA bond or fund may be sold.",
            "Conduct of Business (COBS)",
            SourceFormat::Md,
        )
        .unwrap();
        let aml = ingest_document(
            "# Anti-Money Laundering (AML)\nEach fund is screened.",
            "Anti-Money Laundering (AML)",
            SourceFormat::Md,
        )
        .unwrap();
        let spans = vec![
            span(&cobs, 1, 4, 8, TagType::Prod),   // fund
            span(&cobs, 1, 25, 30, TagType::Ent),  // rules
            span(&cobs, 3, 2, 6, TagType::Prod),   // bond
            span(&cobs, 3, 10, 14, TagType::Prod), // fund
            span(&aml, 1, 5, 9, TagType::Prod),    // fund
            span(&aml, 1, 13, 21, TagType::Risk),  // screened
        ];
        let (tags, occurs) = link(&spans);
        build_graph(&[cobs, aml], &tags, &occurs, &[]).unwrap()
    }

    #[test]
    fn intersection_requires_both_sides() {
        let g = fixture();
        let results = intersect_documents(&g, TagType::Prod, "(COBS)", "(AML)", 50).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].lemma, "fund");
        assert_eq!(results[0].left_occurrences.len(), 2);
        assert_eq!(results[0].right_occurrences.len(), 1);
    }

    #[test]
    fn intersection_limit_and_missing_side() {
        let g = fixture();
        assert!(intersect_documents(&g, TagType::Prod, "(COBS)", "(AML)", 0).unwrap().is_empty());
        assert!(intersect_documents(&g, TagType::Risk, "(COBS)", "(AML)", 10).unwrap().is_empty());
        let err = intersect_documents(&g, TagType::Prod, "(XYZ)", "(AML)", 10).unwrap_err();
        assert!(err.to_string().contains("left"), "{err}");
        let err = intersect_documents(&g, TagType::Prod, "(COBS)", "(XYZ)", 10).unwrap_err();
        assert!(err.to_string().contains("right"), "{err}");
    }

    #[test]
    fn toc_filters_by_plevel_and_nests() {
        let g = fixture();
        let toc = table_of_contents(&g, "(COBS)", 0).unwrap();
        assert_eq!(toc.document, "Conduct of Business (COBS)");
        let ordinals: Vec<u64> = toc.entries.iter().map(|e| e.ordinal).collect();
        assert_eq!(ordinals, vec![0, 1]);
        assert!(toc.entries.iter().all(|e| e.children.is_empty()));

        let full = table_of_contents(&g, "(COBS)", 99).unwrap();
        assert_eq!(full.entries.len(), 2);
        assert_eq!(full.entries[1].ordinal, 1);
        let child_ordinals: Vec<u64> = full.entries[1].children.iter().map(|e| e.ordinal).collect();
        assert_eq!(child_ordinals, vec![2, 3]);
    }

    #[test]
    fn toc_ambiguity_lists_candidates() {
        let g = fixture();
        let err = table_of_contents(&g, "(", 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(COBS)") && msg.contains("(AML)"), "{msg}");
        assert!(matches!(table_of_contents(&g, "nope", 0), Err(Error::NotFound(_))));
    }

    #[test]
    fn usage_joins_and_orders_rows() {
        let g = fixture();
        let rows = tag_usage(&g, TagType::Prod, &LemmaPredicate::Exact { lemma: "fund".into() });
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].document_title, "Anti-Money Laundering (AML)");
        assert_eq!(rows[1].paragraph_ordinal, 1);
        assert_eq!(rows[2].paragraph_ordinal, 3);
        assert!(rows.iter().all(|r| r.occurrence_text == "fund"));

        let contains = tag_usage(
            &g,
            TagType::Prod,
            &LemmaPredicate::ContainsAll { terms: vec!["bo".into(), "nd".into()] },
        );
        assert_eq!(contains.len(), 1);
        assert_eq!(contains[0].lemma, "bond");

        let nothing =
            tag_usage(&g, TagType::Prod, &LemmaPredicate::Exact { lemma: "missing".into() });
        assert!(nothing.is_empty());
    }

    #[test]
    fn same_paragraph_occurrences_are_two_hops_apart() {
        let g = fixture();
        let paths = shortest_paths(&g, "bond", "fund", 4, 100).unwrap();
        let mut lengths: Vec<usize> = paths.iter().map(|p| p.length).collect();
        lengths.sort_unstable();
        // Same paragraph (2 hops), same document via the paragraph tree
        // (3 hops), other document via the shared fund Tag (4 hops).
        assert_eq!(lengths, vec![2, 3, 4]);
        let two_hop = paths.iter().find(|p| p.length == 2).unwrap();
        assert_eq!(two_hop.edge_kinds, vec![EdgeKind::Source, EdgeKind::Source]);
        let three_hop = paths.iter().find(|p| p.length == 3).unwrap();
        assert_eq!(three_hop.edge_kinds, vec![EdgeKind::Source, EdgeKind::Next, EdgeKind::Source]);
        let four_hop = paths.iter().find(|p| p.length == 4).unwrap();
        assert_eq!(
            four_hop.edge_kinds,
            vec![EdgeKind::Source, EdgeKind::Source, EdgeKind::Occur, EdgeKind::Occur]
        );
        for path in &paths {
            assert_eq!(path.length, path.nodes.len() - 1);
        }
    }

    #[test]
    fn path_bounds_and_validation() {
        let g = fixture();
        let short = shortest_paths(&g, "bond", "fund", 2, 100).unwrap();
        assert_eq!(short.len(), 1);
        let limited = shortest_paths(&g, "bond", "fund", 4, 1).unwrap();
        assert_eq!(limited.len(), 1);
        assert!(shortest_paths(&g, "bond", "fund", 0, 100).is_err());
        // NEXT edges are traversable against their direction.
        let reversed = shortest_paths(&g, "rules", "fund", 4, 100).unwrap();
        assert!(reversed
            .iter()
            .any(|p| p.edge_kinds == vec![EdgeKind::Source, EdgeKind::Next, EdgeKind::Source]));
        // The RISK occurrence sits 6 hops from "bond"; under max_len 4 the
        // pair is unreachable and produces no row.
        assert!(shortest_paths(&g, "bond", "screened", 4, 100).unwrap().is_empty());
        assert_eq!(shortest_paths(&g, "bond", "screened", 6, 100).unwrap().len(), 1);
    }

    #[test]
    fn self_pairs_are_excluded() {
        let g = fixture();
        let paths = shortest_paths(&g, "bond", "bond", 4, 100).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn stats_count_and_normalize() {
        let g = fixture();
        let stats = compute_stats(&g, TagType::Prod);
        assert_eq!(stats.occurrences_by_ttype["PROD"], 4);
        assert_eq!(stats.occurrences_by_ttype["ENT"], 1);
        assert_eq!(stats.occurrences_by_ttype["RISK"], 1);
        assert_eq!(stats.occurrences_by_ttype["PERM"], 0);
        assert_eq!(stats.tags_by_ttype["PROD"], 2);
        let total: usize = stats.occurrences_by_ttype.values().sum();
        assert_eq!(total, g.census().node_kinds["TagOccur"]);

        let cobs = &stats.lemma_proportions["Conduct of Business (COBS)"];
        assert!((cobs["fund"] - 2.0 / 3.0).abs() < 1e-9);
        assert!((cobs["bond"] - 1.0 / 3.0).abs() < 1e-9);
        let aml = &stats.lemma_proportions["Anti-Money Laundering (AML)"];
        assert!((aml["fund"] - 1.0).abs() < 1e-9);
        for shares in stats.lemma_proportions.values() {
            let sum: f64 = shares.values().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }

        assert_eq!(stats.cooccurrence["PROD"]["PROD"], 3);
        assert_eq!(stats.cooccurrence["PROD"]["ENT"], 1);
        assert_eq!(stats.cooccurrence["ENT"]["PROD"], 1);
        assert_eq!(stats.cooccurrence["ENT"]["ENT"], 1);
        for a in stats.cooccurrence.keys() {
            for b in stats.cooccurrence.keys() {
                assert_eq!(stats.cooccurrence[a][b], stats.cooccurrence[b][a]);
            }
        }
    }

    #[test]
    fn empty_graph_stats_are_all_zero() {
        let g = PropertyGraph::new();
        let stats = compute_stats(&g, TagType::Prod);
        assert!(stats.occurrences_by_ttype.values().all(|&n| n == 0));
        assert!(stats.tags_by_ttype.values().all(|&n| n == 0));
        assert!(stats.lemma_proportions.is_empty());
        assert_eq!(stats.occurrences_by_ttype.len(), 9);
        assert_eq!(stats.cooccurrence.len(), 9);
    }
}
