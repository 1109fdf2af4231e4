//! Cypher script export: one CREATE statement per node, then one
//! MATCH ... CREATE statement per edge, in graph insertion order. The
//! output imports into any property-graph database that speaks Cypher.

use serde_json::Value;

use crate::graph::{Node, PropertyGraph};
use crate::ids::NodeId;

/// Escape a string for a single-quoted Cypher literal.
pub fn escape_cypher(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Inverse of `escape_cypher`. Fails on a dangling or unknown escape.
pub fn unescape_cypher(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            '\'' => out.push('\''),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}

fn is_plain_key(key: &str) -> bool {
    let mut chars = key.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn render_key(key: &str) -> String {
    if is_plain_key(key) {
        key.to_string()
    } else {
        format!("`{}`", key.replace('`', "``"))
    }
}

fn render_value(value: &Value) -> String {
    match value {
        Value::String(s) => format!("'{}'", escape_cypher(s)),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "null".to_string(),
        other => format!("'{}'", escape_cypher(&other.to_string())),
    }
}

fn render_props(id: Option<&NodeId>, node: &Node) -> String {
    let mut parts = Vec::new();
    if let Some(id) = id {
        parts.push(format!("id: '{}'", escape_cypher(id.as_str())));
    }
    for (key, value) in &node.props {
        parts.push(format!("{}: {}", render_key(key), render_value(value)));
    }
    parts.join(", ")
}

/// The number of statements `export_cypher` emits for this graph.
pub fn statement_count(graph: &PropertyGraph) -> usize {
    graph.node_count() + graph.edge_count()
}

pub fn export_cypher(graph: &PropertyGraph) -> String {
    let mut out = String::new();
    for (id, node) in graph.nodes() {
        out.push_str(&format!(
            "CREATE (:{} {{{}}});\n",
            node.kind.code(),
            render_props(Some(id), node)
        ));
    }
    for edge in graph.edges() {
        let mut rel = format!(":{}", edge.kind.code());
        if !edge.props.is_empty() {
            let parts: Vec<String> = edge
                .props
                .iter()
                .map(|(k, v)| format!("{}: {}", render_key(k), render_value(v)))
                .collect();
            rel.push_str(&format!(" {{{}}}", parts.join(", ")));
        }
        out.push_str(&format!(
            "MATCH (a {{id: '{}'}}), (b {{id: '{}'}}) CREATE (a)-[{}]->(b);\n",
            escape_cypher(edge.src.as_str()),
            escape_cypher(edge.dst.as_str()),
            rel
        ));
    }
    out
}
