//! Wire/file form of a weighted view. Field order is fixed so identical
//! views serialize byte-identically.

use serde::{Deserialize, Serialize};

use crate::model::{Label, LabeledGraph, VertexId};
use crate::view::WeightedView;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewDocument {
    pub l_c: Vec<Label>,
    pub l_b: Vec<Label>,
    pub filter: Vec<VertexId>,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: VertexId,
    pub label: Label,
    pub weight: u64,
    pub support: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
    pub support: Vec<VertexId>,
}

impl ViewDocument {
    pub fn new(g: &LabeledGraph, wv: &WeightedView) -> Self {
        let view = &wv.view;
        let vertices = view
            .vertex_support
            .iter()
            .map(|(id, support)| VertexEntry {
                id: id.clone(),
                label: g.label_of(id.as_str()).cloned().expect("view vertex belongs to the graph"),
                weight: wv.vertex_weight[id],
                support: support.iter().cloned().collect(),
            })
            .collect();
        let edges = view
            .edge_support
            .iter()
            .map(|(e, support)| EdgeEntry {
                u: e.u.clone(),
                v: e.v.clone(),
                weight: wv.edge_weight[e],
                support: support.iter().cloned().collect(),
            })
            .collect();
        ViewDocument {
            l_c: view.l_c.iter().cloned().collect(),
            l_b: view.l_b.iter().cloned().collect(),
            filter: view.filter.iter().cloned().collect(),
            vertices,
            edges,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("view document is always serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("view document is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures::g0, label_set, EdgeMode, Filter};
    use crate::view::{gen_view, minimal_view, weigh};

    #[test]
    fn golden_json() {
        let g = g0();
        let f = Filter::new(&g, ["x1"]).unwrap();
        let v = gen_view(&g, &f, &label_set(["Z"]), &label_set(["Y"]), EdgeMode::Undirected).unwrap();
        let doc = ViewDocument::new(&g, &weigh(minimal_view(&v)));
        assert_eq!(
            doc.to_json(),
            r#"{"l_c":["Z"],"l_b":["Y"],"filter":["x1"],"vertices":[{"id":"z1","label":"Z","weight":2,"support":["y1","y2"]}],"edges":[]}"#
        );
        let back: ViewDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn edge_entries() {
        let g = g0();
        let v = gen_view(&g, &Filter::empty(), &label_set(["X"]), &label_set(["Y"]), EdgeMode::Undirected).unwrap();
        let doc = ViewDocument::new(&g, &weigh(v));
        assert_eq!(doc.vertices.len(), 2);
        assert_eq!(
            doc.edges,
            vec![EdgeEntry {
                u: "x1".into(),
                v: "x2".into(),
                weight: 1,
                support: vec!["y2".into()],
            }]
        );
    }
}
