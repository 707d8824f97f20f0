//! The frozen base graph, its label schema, and filter primitives.
//!
//! A [`LabeledGraph`] is built once through [`GraphBuilder`] (or
//! [`ingest_graph`]) and is immutable afterwards. Internally vertices and
//! labels are stored in lexicographic order, so index order doubles as the
//! deterministic output order everywhere downstream.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

macro_rules! interned_name {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                $name(Arc::from(s.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", &*self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl PartialEq<str> for $name {
            fn eq(&self, other: &str) -> bool {
                &*self.0 == other
            }
        }

        impl PartialEq<&str> for $name {
            fn eq(&self, other: &&str) -> bool {
                &*self.0 == *other
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(Arc::from(s))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                String::deserialize(deserializer).map($name::from)
            }
        }
    };
}

interned_name!(
    /// Opaque vertex identifier.
    VertexId
);
interned_name!(
    /// Case-sensitive vertex label.
    Label
);

/// How schema and data edges may be traversed when building and matching
/// patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeMode {
    /// Edges are traversable both ways and a single pattern is generated per
    /// (L_B, L_C) label combination.
    #[default]
    Undirected,
    /// Edges are traversed along their direction only and every combination
    /// yields a pattern pair.
    Directed,
}

impl EdgeMode {
    pub fn is_undirected(self) -> bool {
        self == EdgeMode::Undirected
    }
}

/// Counts of input edges dropped while freezing a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Accumulates nodes and edges, then freezes them into a [`LabeledGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<(VertexId, Label)>,
    index: HashMap<VertexId, u32>,
    extra_labels: BTreeSet<Label>,
    edges: Vec<(u32, u32)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<VertexId>, label: impl Into<Label>) -> Result<()> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateNodeId(id.to_string()));
        }
        self.index.insert(id.clone(), self.nodes.len() as u32);
        self.nodes.push((id, label.into()));
        Ok(())
    }

    /// Declares a label that may have no vertices. It still belongs to the
    /// graph's label set.
    pub fn add_label(&mut self, label: impl Into<Label>) {
        self.extra_labels.insert(label.into());
    }

    pub fn add_edge(&mut self, src: &str, dst: &str) -> Result<()> {
        let s = *self
            .index
            .get(src)
            .ok_or_else(|| Error::UnknownEndpoint(src.to_string()))?;
        let d = *self
            .index
            .get(dst)
            .ok_or_else(|| Error::UnknownEndpoint(dst.to_string()))?;
        if s == d {
            self.self_loops += 1;
        } else {
            self.edges.push((s, d));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn build(self) -> (LabeledGraph, IngestReport) {
        let GraphBuilder {
            nodes,
            extra_labels,
            edges,
            self_loops,
            ..
        } = self;

        let mut labels: BTreeSet<Label> = extra_labels;
        labels.extend(nodes.iter().map(|(_, l)| l.clone()));
        let labels: Vec<Label> = labels.into_iter().collect();
        let label_index: HashMap<&Label, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l, i as u32))
            .collect();

        // Renumber vertices so that index order is id order.
        let mut order: Vec<u32> = (0..nodes.len() as u32).collect();
        order.sort_by(|&a, &b| nodes[a as usize].0.cmp(&nodes[b as usize].0));
        let mut remap = vec![0u32; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let ids: Vec<VertexId> = order.iter().map(|&o| nodes[o as usize].0.clone()).collect();
        let label_of: Vec<u32> = order
            .iter()
            .map(|&o| label_index[&nodes[o as usize].1])
            .collect();

        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(s, d)| (remap[s as usize], remap[d as usize]))
            .collect();
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        let duplicate_edges = before - edges.len();

        let n = ids.len();
        let out = Csr::build(n, edges.iter().copied());
        let inc = Csr::build(n, edges.iter().map(|&(s, d)| (d, s)));

        let mut by_label = vec![Vec::new(); labels.len()];
        for (v, &l) in label_of.iter().enumerate() {
            by_label[l as usize].push(v as u32);
        }

        let index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();

        let mut graph = LabeledGraph {
            ids,
            index,
            labels,
            label_of,
            out,
            inc,
            by_label,
            edge_count: edges.len(),
            schema: SchemaGraph::default(),
        };
        graph.schema = derive_schema(&graph);
        (
            graph,
            IngestReport {
                duplicate_edges,
                self_loops,
            },
        )
    }
}

#[derive(Debug, Clone)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(n: usize, edges: impl Iterator<Item = (u32, u32)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (s, _) in edges.clone() {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for (s, d) in edges {
            targets[cursor[s as usize]] = d;
            cursor[s as usize] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Csr { offsets, targets }
    }

    fn row(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }
}

/// Directed, vertex-labeled graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, u32>,
    labels: Vec<Label>,
    label_of: Vec<u32>,
    out: Csr,
    inc: Csr,
    by_label: Vec<Vec<u32>>,
    edge_count: usize,
    schema: SchemaGraph,
}

/// Builds a graph from node and edge lists. Duplicate edges and self-loops
/// are dropped and counted in the report.
pub fn ingest_graph<N, E, I, L, S>(nodes: N, edges: E) -> Result<(LabeledGraph, IngestReport)>
where
    N: IntoIterator<Item = (I, L)>,
    E: IntoIterator<Item = (S, S)>,
    I: Into<VertexId>,
    L: Into<Label>,
    S: AsRef<str>,
{
    let mut b = GraphBuilder::new();
    for (id, label) in nodes {
        b.add_node(id, label)?;
    }
    for (s, d) in edges {
        b.add_edge(s.as_ref(), d.as_ref())?;
    }
    Ok(b.build())
}

impl LabeledGraph {
    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Vertex ids in lexicographic order.
    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &VertexId> {
        self.ids.iter()
    }

    /// Labels in lexicographic order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// The schema, derived once at build time.
    pub fn schema(&self) -> &SchemaGraph {
        &self.schema
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.label_index(label).is_some()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn label_of(&self, id: &str) -> Option<&Label> {
        self.index
            .get(id)
            .map(|&v| &self.labels[self.label_of[v as usize] as usize])
    }

    /// Directed edges as id pairs, ordered by (source, target).
    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> {
        (0..self.ids.len() as u32).flat_map(move |s| {
            self.out
                .row(s)
                .iter()
                .map(move |&d| (&self.ids[s as usize], &self.ids[d as usize]))
        })
    }

    pub fn has_edge(&self, src: &str, dst: &str) -> bool {
        match (self.index.get(src), self.index.get(dst)) {
            (Some(&s), Some(&d)) => self.out.row(s).binary_search(&d).is_ok(),
            _ => false,
        }
    }

    pub(crate) fn vertex_index(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub(crate) fn label_index(&self, label: &str) -> Option<u32> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| i as u32)
    }

    pub(crate) fn id(&self, v: u32) -> &VertexId {
        &self.ids[v as usize]
    }

    pub(crate) fn label_idx_of(&self, v: u32) -> u32 {
        self.label_of[v as usize]
    }

    pub(crate) fn label_at(&self, l: u32) -> &Label {
        &self.labels[l as usize]
    }

    pub(crate) fn out_neighbors(&self, v: u32) -> &[u32] {
        self.out.row(v)
    }

    pub(crate) fn in_neighbors(&self, v: u32) -> &[u32] {
        self.inc.row(v)
    }

    pub(crate) fn vertices_with_label(&self, l: u32) -> &[u32] {
        &self.by_label[l as usize]
    }

    /// Resolves a label set against the graph, rejecting unknown labels.
    pub fn check_labels<'a, I>(&self, labels: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a Label>,
    {
        for l in labels {
            if !self.has_label(l.as_str()) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        Ok(())
    }
}

/// The reachability graph over labels.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SchemaGraph {
    pub labels: BTreeSet<Label>,
    pub edges: BTreeSet<(Label, Label)>,
}

impl SchemaGraph {
    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges
            .iter()
            .any(|(x, y)| x.as_str() == a && y.as_str() == b)
    }
}

pub fn derive_schema(g: &LabeledGraph) -> SchemaGraph {
    let mut edges = BTreeSet::new();
    for s in 0..g.vertex_count() as u32 {
        let ls = g.label_idx_of(s);
        for &d in g.out_neighbors(s) {
            edges.insert((ls, g.label_idx_of(d)));
        }
    }
    SchemaGraph {
        labels: g.labels.iter().cloned().collect(),
        edges: edges
            .into_iter()
            .map(|(a, b)| (g.label_at(a).clone(), g.label_at(b).clone()))
            .collect(),
    }
}

/// A user selection F of data vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Filter {
    pub members: BTreeSet<VertexId>,
}

impl Filter {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a filter, checking every member against the graph.
    pub fn new<I, S>(g: &LabeledGraph, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut members = BTreeSet::new();
        for id in ids {
            let id = id.as_ref();
            let v = g
                .vertex_index(id)
                .ok_or_else(|| Error::UnknownVertex(id.to_string()))?;
            members.insert(g.id(v).clone());
        }
        Ok(Filter { members })
    }

    pub fn from_members(members: BTreeSet<VertexId>) -> Self {
        Filter { members }
    }

    pub fn validate(&self, g: &LabeledGraph) -> Result<()> {
        match self.members.iter().find(|m| !g.contains(m.as_str())) {
            Some(m) => Err(Error::UnknownVertex(m.to_string())),
            None => Ok(()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexId> {
        self.members.iter()
    }

    /// Membership bitmap over vertex indices.
    pub(crate) fn mask(&self, g: &LabeledGraph) -> Vec<bool> {
        let mut mask = vec![false; g.vertex_count()];
        for m in &self.members {
            if let Some(v) = g.vertex_index(m.as_str()) {
                mask[v as usize] = true;
            }
        }
        mask
    }
}

/// L_F: the labels carried by members of the filter.
pub fn filter_labels(g: &LabeledGraph, f: &Filter) -> BTreeSet<Label> {
    f.members
        .iter()
        .filter_map(|m| g.label_of(m.as_str()).cloned())
        .collect()
}

/// F restricted to members whose label lies in `sub_labels`.
pub fn restrict_filter(
    g: &LabeledGraph,
    f: &Filter,
    sub_labels: &BTreeSet<Label>,
) -> Result<BTreeSet<VertexId>> {
    g.check_labels(sub_labels)?;
    Ok(f.members
        .iter()
        .filter(|m| {
            g.label_of(m.as_str())
                .is_some_and(|l| sub_labels.contains(l))
        })
        .cloned()
        .collect())
}

/// Convenience constructor for label sets.
pub fn label_set<I, S>(labels: I) -> BTreeSet<Label>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels.into_iter().map(Label::new).collect()
}

/// Convenience constructor for vertex id sets.
pub fn id_set<I, S>(ids: I) -> BTreeSet<VertexId>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    ids.into_iter().map(VertexId::new).collect()
}


#[cfg(test)]
mod tests {
    use super::fixtures::g0;
    use super::*;

    #[test]
    fn singleton_graph() {
        let (g, report) = ingest_graph([("x1", "X")], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn g0_counts() {
        let g = g0();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.label_count(), 3);
    }

    #[test]
    fn unknown_endpoint_rejected() {
        let err = ingest_graph([("x1", "X")], [("x1", "q9")]).unwrap_err();
        assert_eq!(err, Error::UnknownEndpoint("q9".into()));
    }

    #[test]
    fn duplicate_node_rejected() {
        let err = ingest_graph([("x1", "X"), ("x1", "Y")], Vec::<(&str, &str)>::new()).unwrap_err();
        assert_eq!(err, Error::DuplicateNodeId("x1".into()));
    }

    #[test]
    fn duplicates_and_self_loops_dropped() {
        let (g, report) = ingest_graph(
            [("a", "A"), ("b", "B")],
            [("a", "b"), ("a", "b"), ("b", "b"), ("b", "a")],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.duplicate_edges, 1);
        assert_eq!(report.self_loops, 1);
        assert!(g.has_edge("a", "b") && g.has_edge("b", "a"));
    }

    #[test]
    fn schema_of_g0() {
        let s = derive_schema(&g0());
        assert_eq!(s.labels, label_set(["X", "Y", "Z"]));
        let expected: BTreeSet<_> = [("X", "Y"), ("Y", "Z")]
            .into_iter()
            .map(|(a, b)| (Label::new(a), Label::new(b)))
            .collect();
        assert_eq!(s.edges, expected);
    }

    #[test]
    fn schema_of_edgeless_graph() {
        let (g, _) = ingest_graph([("x1", "X"), ("y1", "Y")], Vec::<(&str, &str)>::new()).unwrap();
        assert!(derive_schema(&g).edges.is_empty());
    }

    #[test]
    fn schema_with_back_edge() {
        let (g, _) = ingest_graph([("x1", "X"), ("y1", "Y")], [("x1", "y1"), ("y1", "x1")]).unwrap();
        let s = derive_schema(&g);
        assert!(s.has_edge("X", "Y") && s.has_edge("Y", "X"));
        assert_eq!(s.edges.len(), 2);
    }

    #[test]
    fn filter_labels_g0() {
        let g = g0();
        let f = Filter::new(&g, ["x1", "x2", "z1"]).unwrap();
        assert_eq!(filter_labels(&g, &f), label_set(["X", "Z"]));
        assert!(filter_labels(&g, &Filter::empty()).is_empty());
    }

    #[test]
    fn restrict_filter_g0() {
        let g = g0();
        let f = Filter::new(&g, ["x1", "z1"]).unwrap();
        assert_eq!(restrict_filter(&g, &f, &label_set(["Z"])).unwrap(), id_set(["z1"]));
        assert!(restrict_filter(&g, &f, &BTreeSet::new()).unwrap().is_empty());
        assert_eq!(
            restrict_filter(&g, &f, &label_set(["X", "Y", "Z"])).unwrap(),
            f.members
        );
        assert_eq!(
            restrict_filter(&g, &f, &label_set(["W"])).unwrap_err(),
            Error::UnknownLabel("W".into())
        );
    }

    #[test]
    fn filter_rejects_unknown_vertex() {
        assert_eq!(
            Filter::new(&g0(), ["nope"]).unwrap_err(),
            Error::UnknownVertex("nope".into())
        );
    }

    #[test]
    fn declared_label_without_vertices() {
        let mut b = GraphBuilder::new();
        b.add_node("a", "A").unwrap();
        b.add_label("B");
        let (g, _) = b.build();
        assert_eq!(g.label_count(), 2);
        assert!(g.has_label("B"));
    }
}
