//! Graphviz export of weighted views.

use std::fmt::Write as _;

use crate::document::ViewDocument;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT text. Vertex weight is a label suffix, edge weight sets
/// both the edge label and `penwidth`.
pub fn to_dot(doc: &ViewDocument) -> String {
    let mut out = String::from("graph view {\n");
    for v in &doc.vertices {
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quote(v.id.as_str()),
            quote(&format!("{} ({})", v.id, v.weight))
        );
    }
    for e in &doc.edges {
        let w = e.weight;
        let _ = writeln!(
            out,
            "  {} -- {} [label=\"{w}\", penwidth={w}];",
            quote(e.u.as_str()),
            quote(e.v.as_str())
        );
    }
    out.push_str("}\n");
    out
}
