//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! N <id> <label>
//! E <src-id> <dst-id>
//! ```
//!
//! Node lines must precede the edge lines that reference them. Ids and labels
//! are single whitespace-free tokens and may not contain `,` or `;`, which are
//! reserved as list separators by walk scripts and history exports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GraphBuilder, IngestReport, LabeledGraph};

const RESERVED: &[char] = &[',', ';'];

fn token<'a>(line: usize, what: &str, tok: Option<&'a str>) -> Result<&'a str> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    if tok.contains(RESERVED) {
        return Err(Error::Parse {
            line,
            message: format!("{what} `{tok}` contains a reserved character (`,` or `;`)"),
        });
    }
    Ok(tok)
}

/// Counts reported after ingestion, in a fixed field order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub labels: usize,
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl GraphSummary {
    pub fn new(g: &LabeledGraph, report: IngestReport) -> Self {
        GraphSummary {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            labels: g.label_count(),
            duplicate_edges: report.duplicate_edges,
            self_loops: report.self_loops,
        }
    }
}

pub fn parse_graph(text: &str) -> Result<(LabeledGraph, IngestReport)> {
    let mut b = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        match kind {
            "N" => {
                let id = token(line, "vertex id", parts.next())?;
                let label = token(line, "label", parts.next())?;
                b.add_node(id, label)?;
            }
            "E" => {
                let src = token(line, "source id", parts.next())?;
                let dst = token(line, "target id", parts.next())?;
                b.add_edge(src, dst)?;
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown record type `{other}`"),
                })
            }
        }
        if let Some(extra) = parts.next() {
            return Err(Error::Parse {
                line,
                message: format!("unexpected trailing token `{extra}`"),
            });
        }
    }
    Ok(b.build())
}

/// Canonical text form: nodes in id order, then edges in (source, target)
/// order. Parsing the output yields an identical graph.
pub fn write_graph(g: &LabeledGraph) -> String {
    let mut out = String::new();
    for id in g.vertices() {
        let label = g.label_of(id.as_str()).expect("vertex has a label");
        let _ = writeln!(out, "N {id} {label}");
    }
    for (s, d) in g.edges() {
        let _ = writeln!(out, "E {s} {d}");
    }
    out
}
