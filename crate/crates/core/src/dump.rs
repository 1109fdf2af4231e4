//! Graph persistence: a line-oriented JSON dump with a counted header and
//! a checksum trailer. Loading an identical dump reproduces an identical
//! graph, including node and edge order.
//!
//! Layout (one JSON object per line):
//!   line 1            header  {"format_version":1,"nodes":N,"edges":E}
//!   lines 2..2+N      nodes   {"id":..,"kind":..,"props":{..}}
//!   lines 2+N..2+N+E  edges   {"src":..,"dst":..,"kind":..,"props":{..}}
//!   last line         trailer {"checksum":"<sha256 of all prior bytes>"}

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, NodeKind, PropertyGraph};
use crate::ids::NodeId;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeLine {
    id: NodeId,
    kind: NodeKind,
    props: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct EdgeLine {
    src: NodeId,
    dst: NodeId,
    kind: EdgeKind,
    props: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct Trailer {
    checksum: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn dump_to_string(graph: &PropertyGraph) -> String {
    let mut payload = String::new();
    let header = Header {
        format_version: FORMAT_VERSION,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
    };
    payload.push_str(&serde_json::to_string(&header).expect("header serializes"));
    payload.push('\n');
    for (id, node) in graph.nodes() {
        let line = NodeLine { id: id.clone(), kind: node.kind, props: node.props.clone() };
        payload.push_str(&serde_json::to_string(&line).expect("node serializes"));
        payload.push('\n');
    }
    for edge in graph.edges() {
        let line = EdgeLine {
            src: edge.src.clone(),
            dst: edge.dst.clone(),
            kind: edge.kind,
            props: edge.props.clone(),
        };
        payload.push_str(&serde_json::to_string(&line).expect("edge serializes"));
        payload.push('\n');
    }
    let trailer = Trailer { checksum: sha256_hex(payload.as_bytes()) };
    let mut out = payload;
    out.push_str(&serde_json::to_string(&trailer).expect("trailer serializes"));
    out.push('\n');
    out
}

fn parse_line<'a, T: Deserialize<'a>>(line: &'a str, lineno: usize, what: &str) -> Result<T> {
    serde_json::from_str(line).map_err(|e| Error::format(lineno, format!("bad {what} record: {e}")))
}

/// Byte offset where the line with index `line_idx` (0-based) begins.
fn line_offset(text: &str, line_idx: usize) -> usize {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i == line_idx {
            break;
        }
        offset += line.len();
    }
    offset
}

pub fn load_from_str(text: &str) -> Result<PropertyGraph> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        return Err(Error::format(1, "dump is empty"));
    }
    let header: Header = parse_line(lines[0], 1, "header")?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::format(
            1,
            format!(
                "unsupported dump format version {} (expected {FORMAT_VERSION})",
                header.format_version
            ),
        ));
    }
    let trailer_idx = 1 + header.nodes + header.edges;
    if lines.len() <= trailer_idx {
        return Err(Error::format(
            lines.len() + 1,
            format!(
                "dump ends early: header promises {} node and {} edge records plus a trailer",
                header.nodes, header.edges
            ),
        ));
    }
    let mut graph = PropertyGraph::new();
    for i in 0..header.nodes {
        let node: NodeLine = parse_line(lines[1 + i], 2 + i, "node")?;
        graph.add_node(node.id, node.kind, node.props)?;
    }
    for i in 0..header.edges {
        let lineno = 2 + header.nodes + i;
        let edge: EdgeLine = parse_line(lines[1 + header.nodes + i], lineno, "edge")?;
        graph.add_edge(edge.src, edge.dst, edge.kind, edge.props)?;
    }
    let trailer: Trailer = parse_line(lines[trailer_idx], trailer_idx + 1, "trailer")?;
    let payload_len = line_offset(text, trailer_idx);
    let expected = sha256_hex(&text.as_bytes()[..payload_len]);
    if trailer.checksum != expected {
        return Err(Error::format(
            trailer_idx + 1,
            format!(
                "checksum mismatch: trailer says {} but payload hashes to {expected}",
                trailer.checksum
            ),
        ));
    }
    for (i, extra) in lines[trailer_idx + 1..].iter().enumerate() {
        if !extra.trim().is_empty() {
            return Err(Error::format(trailer_idx + 2 + i, "unexpected content after trailer"));
        }
    }
    Ok(graph)
}

pub fn dump_to_path(graph: &PropertyGraph, path: &Path) -> Result<()> {
    let text = dump_to_string(graph);
    // Write beside the target and rename so readers never see a torn file.
    let tmp = path.with_extension("rkgd.tmp");
    fs::write(&tmp, &text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_from_path(path: &Path) -> Result<PropertyGraph> {
    let text = fs::read_to_string(path)?;
    load_from_str(&text)
}
