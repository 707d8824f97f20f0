//! Tree-shaped label patterns over the schema.
//!
//! Patterns are approximate Steiner minimal trees over the unit-weight schema:
//! the metric closure over the terminals is built with breadth-first shortest
//! paths, its minimum spanning tree is expanded back into schema paths, a
//! spanning tree of that union is taken and non-terminal leaves are pruned.
//! Every choice between equal-cost alternatives goes to the lexicographically
//! smallest label sequence.
//!
//! In directed mode the pattern must additionally carry a directed path from
//! its source to its sink. That path is fixed first (a shortest one) and the
//! closure is then built over it as a single contracted terminal.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EdgeMode, Label, SchemaGraph};

/// A connected tree over labels with a designated source and sink.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GraphPattern {
    pub vertices: BTreeSet<Label>,
    pub edges: BTreeSet<(Label, Label)>,
    pub source: Label,
    pub sink: Label,
}

/// Patterns generated for one (L_B label, L_C label) combination.
///
/// `left` carries a path from the L_C terminal to the L_B terminal; `right`
/// is the same tree with that path reversed. In undirected mode only `left`
/// is produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternPair {
    /// The L_B label of the combination.
    pub from: Label,
    /// The L_C label of the combination.
    pub to: Label,
    pub left: GraphPattern,
    pub right: Option<GraphPattern>,
}

impl PatternPair {
    pub fn patterns(&self) -> impl Iterator<Item = &GraphPattern> {
        std::iter::once(&self.left).chain(self.right.as_ref())
    }
}

impl GraphPattern {
    /// The 0-edge pattern on a single label.
    pub fn single(label: Label) -> Self {
        GraphPattern {
            vertices: BTreeSet::from([label.clone()]),
            edges: BTreeSet::new(),
            source: label.clone(),
            sink: label,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` within the pattern, as (neighbor, edge points away from v).
    pub(crate) fn incident<'a>(&'a self, v: &'a Label) -> impl Iterator<Item = (&'a Label, bool)> + 'a {
        self.edges.iter().filter_map(move |(a, b)| {
            if a == v {
                Some((b, true))
            } else if b == v {
                Some((a, false))
            } else {
                None
            }
        })
    }

    fn weakly_connected(&self) -> bool {
        let Some(start) = self.vertices.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.incident(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Nonempty, weakly connected, and |E| = |V| - 1.
    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && self
                .edges
                .iter()
                .all(|(a, b)| a != b && self.vertices.contains(a) && self.vertices.contains(b))
            && self.weakly_connected()
    }

    /// Whether a path `from -> ... -> to` exists within the pattern edges,
    /// following edge direction unless `mode` is undirected.
    pub fn has_path(&self, from: &Label, to: &Label, mode: EdgeMode) -> bool {
        if !self.vertices.contains(from) || !self.vertices.contains(to) {
            return false;
        }
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for (w, forward) in self.incident(v) {
                if (forward || mode.is_undirected()) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        false
    }

    /// Checks every structural invariant against a schema; the error string
    /// names the first violated one.
    pub fn check(&self, schema: &SchemaGraph, mode: EdgeMode) -> std::result::Result<(), String> {
        if let Some(l) = self.vertices.iter().find(|l| !schema.labels.contains(*l)) {
            return Err(format!("label {l} not in schema"));
        }
        for (a, b) in &self.edges {
            let ok = schema.edges.contains(&(a.clone(), b.clone()))
                || (mode.is_undirected() && schema.edges.contains(&(b.clone(), a.clone())));
            if !ok {
                return Err(format!("edge {a}>{b} not in schema"));
            }
        }
        if !self.is_tree() {
            return Err("not a tree".into());
        }
        if !self.vertices.contains(&self.source) || !self.vertices.contains(&self.sink) {
            return Err("source or sink missing".into());
        }
        if !self.has_path(&self.source, &self.sink, mode) {
            return Err(format!("no path {} -> {}", self.source, self.sink));
        }
        Ok(())
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items
        .into_iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pattern{{vertices=[{}], edges=[{}], source={}, sink={}}}",
            join(&self.vertices, ","),
            join(self.edges.iter().map(|(a, b)| format!("{a}>{b}")), ","),
            self.source,
            self.sink
        )
    }
}

impl FromStr for GraphPattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let body = s
            .trim()
            .strip_prefix("pattern{")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or("expected pattern{...}")?;
        let field = |name: &str| -> std::result::Result<&str, String> {
            let start = body
                .find(&format!("{name}="))
                .ok_or(format!("missing field {name}"))?
                + name.len()
                + 1;
            let rest = &body[start..];
            if let Some(inner) = rest.strip_prefix('[') {
                let end = inner.find(']').ok_or("unterminated list")?;
                Ok(&inner[..end])
            } else {
                Ok(rest.split(',').next().unwrap_or("").trim())
            }
        };
        let list = |raw: &str| -> Vec<String> {
            raw.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect()
        };
        let vertices = list(field("vertices")?).into_iter().map(Label::from).collect();
        let mut edges = BTreeSet::new();
        for e in list(field("edges")?) {
            let (a, b) = e.split_once('>').ok_or(format!("bad edge `{e}`"))?;
            edges.insert((Label::new(a.trim()), Label::new(b.trim())));
        }
        Ok(GraphPattern {
            vertices,
            edges,
            source: Label::new(field("source")?),
            sink: Label::new(field("sink")?),
        })
    }
}

/// Which schema edges a source-to-sink path may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PathRule {
    /// Any schema edge, either orientation.
    Weak,
    /// Schema edges along their direction.
    Directed,
    /// Schema edges present in both directions, so the path can be reversed.
    Reversible,
}

/// Index-based view of a schema. Label index order is lexicographic order.
pub(crate) struct SchemaIndex<'a> {
    labels: Vec<&'a Label>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    weak: Vec<Vec<usize>>,
    both: Vec<Vec<usize>>,
}

impl<'a> SchemaIndex<'a> {
    pub(crate) fn new(schema: &'a SchemaGraph) -> Self {
        let labels: Vec<&Label> = schema.labels.iter().collect();
        let n = labels.len();
        let idx = |l: &Label| labels.binary_search(&l).ok();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (a, b) in &schema.edges {
            if let (Some(i), Some(j)) = (idx(a), idx(b)) {
                if i != j {
                    out[i].push(j);
                    inc[j].push(i);
                }
            }
        }
        let mut weak = vec![Vec::new(); n];
        let mut both = vec![Vec::new(); n];
        for v in 0..n {
            out[v].sort_unstable();
            inc[v].sort_unstable();
            let mut w: Vec<usize> = out[v].iter().chain(&inc[v]).copied().collect();
            w.sort_unstable();
            w.dedup();
            weak[v] = w;
            both[v] = out[v]
                .iter()
                .copied()
                .filter(|x| inc[v].binary_search(x).is_ok())
                .collect();
        }
        SchemaIndex {
            labels,
            out,
            inc,
            weak,
            both,
        }
    }

    pub(crate) fn index_of(&self, l: &Label) -> Option<usize> {
        self.labels.binary_search(&l).ok()
    }

    fn forward(&self, rule: PathRule) -> &[Vec<usize>] {
        match rule {
            PathRule::Weak => &self.weak,
            PathRule::Directed => &self.out,
            PathRule::Reversible => &self.both,
        }
    }

    fn backward(&self, rule: PathRule) -> &[Vec<usize>] {
        match rule {
            PathRule::Weak => &self.weak,
            PathRule::Directed => &self.inc,
            PathRule::Reversible => &self.both,
        }
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.out[a].binary_search(&b).is_ok()
    }

    /// Hop distance from every label to the nearest member of `targets`.
    fn distances_to(&self, targets: &[usize], rule: PathRule) -> Vec<Option<usize>> {
        let back = self.backward(rule);
        let mut dist = vec![None; self.labels.len()];
        let mut queue = VecDeque::new();
        for &t in targets {
            if dist[t].is_none() {
                dist[t] = Some(0);
                queue.push_back(t);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &back[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Lexicographically smallest among the shortest paths from any member of
    /// `from` to any member of `to`.
    pub(crate) fn shortest_path(&self, from: &[usize], to: &[usize], rule: PathRule) -> Option<Vec<usize>> {
        let dist = self.distances_to(to, rule);
        let start = from
            .iter()
            .copied()
            .filter_map(|v| dist[v].map(|d| (d, v)))
            .min()?
            .1;
        let fwd = self.forward(rule);
        let mut path = vec![start];
        let mut v = start;
        while let Some(d) = dist[v].filter(|&d| d > 0) {
            v = *fwd[v]
                .iter()
                .find(|&&w| dist[w] == Some(d - 1))
                .expect("bfs layer has a successor");
            path.push(v);
        }
        Some(path)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// A solved tree in index form together with its fixed source-to-sink path.
pub(crate) struct IndexedTree {
    pub vertices: BTreeSet<usize>,
    /// Oriented edges.
    pub edges: BTreeSet<(usize, usize)>,
    /// The source-to-sink path (empty when not fixed up front).
    pub spine: Vec<usize>,
}

/// Approximate Steiner tree connecting `terminals`, with `source` and `sink`
/// linked by a path obeying `rule`.
pub(crate) fn solve_tree(
    index: &SchemaIndex<'_>,
    terminals: &BTreeSet<usize>,
    source: usize,
    sink: usize,
    rule: PathRule,
) -> Option<IndexedTree> {
    // The spine is fixed before the closure whenever the path is constrained.
    let spine = match rule {
        PathRule::Weak => Vec::new(),
        _ => index.shortest_path(&[source], &[sink], rule)?,
    };

    let mut groups: Vec<Vec<usize>> = Vec::new();
    if !spine.is_empty() {
        let mut g = spine.clone();
        g.sort_unstable();
        groups.push(g);
    }
    for &t in terminals {
        if !spine.contains(&t) {
            groups.push(vec![t]);
        }
    }
    groups.sort_by_key(|g| g[0]);

    // Metric closure between groups.
    let mut closure = Vec::new();
    for i in 0..groups.len() {
        let dist = index.distances_to(&groups[i], PathRule::Weak);
        for (j, group) in groups.iter().enumerate().skip(i + 1) {
            if let Some(d) = group.iter().filter_map(|&v| dist[v]).min() {
                closure.push((d, i, j));
            }
        }
    }
    closure.sort_unstable();

    let mut uf = UnionFind::new(groups.len());
    let mut union_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut joined = 0;
    for &(_, i, j) in &closure {
        if uf.union(i, j) {
            joined += 1;
            let path = index.shortest_path(&groups[i], &groups[j], PathRule::Weak)?;
            for w in path.windows(2) {
                union_edges.insert(ordered(w[0], w[1]));
            }
        }
    }
    if joined + 1 < groups.len().max(1) {
        return None;
    }

    // Spanning tree of the expanded union, spine edges first.
    let spine_edges: BTreeSet<(usize, usize)> =
        spine.windows(2).map(|w| ordered(w[0], w[1])).collect();
    let mut tree_vertices: BTreeSet<usize> = terminals.clone();
    tree_vertices.extend(spine.iter().copied());
    for &(a, b) in &union_edges {
        tree_vertices.insert(a);
        tree_vertices.insert(b);
    }
    let mut uf = UnionFind::new(index.labels.len());
    let mut tree_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in spine_edges.iter().chain(union_edges.difference(&spine_edges)) {
        if uf.union(a, b) {
            tree_edges.insert((a, b));
        }
    }

    // Prune non-terminal leaves.
    let required: BTreeSet<usize> = terminals.iter().chain(&spine).copied().collect();
    loop {
        let leaf = tree_vertices.iter().copied().find(|v| {
            !required.contains(v) && tree_edges.iter().filter(|(a, b)| a == v || b == v).count() <= 1
        });
        match leaf {
            Some(v) => {
                tree_vertices.remove(&v);
                tree_edges.retain(|&(a, b)| a != v && b != v);
            }
            None => break,
        }
    }

    // Orient: spine along its path, other edges by schema direction, and edges
    // present both ways point away from the source.
    let mut oriented = BTreeSet::new();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([source]);
    let mut seen = BTreeSet::from([source]);
    while let Some(v) = queue.pop_front() {
        for &(a, b) in &tree_edges {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if seen.insert(w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    for &(a, b) in &tree_edges {
        let on_spine = spine
            .windows(2)
            .find(|w| ordered(w[0], w[1]) == (a, b))
            .map(|w| (w[0], w[1]));
        let edge = if let Some(e) = on_spine {
            e
        } else {
            match (index.has_edge(a, b), index.has_edge(b, a)) {
                (true, false) => (a, b),
                (false, true) => (b, a),
                _ => {
                    if parent.get(&b) == Some(&a) {
                        (a, b)
                    } else {
                        (b, a)
                    }
                }
            }
        };
        oriented.insert(edge);
    }

    Some(IndexedTree {
        vertices: tree_vertices,
        edges: oriented,
        spine,
    })
}

fn join_labels(labels: &BTreeSet<Label>) -> String {
    format!("{{{}}}", join(labels, ","))
}

fn to_pattern(index: &SchemaIndex<'_>, tree: &IndexedTree, source: usize, sink: usize) -> GraphPattern {
    let l = |i: usize| index.labels[i].clone();
    GraphPattern {
        vertices: tree.vertices.iter().map(|&v| l(v)).collect(),
        edges: tree.edges.iter().map(|&(a, b)| (l(a), l(b))).collect(),
        source: l(source),
        sink: l(sink),
    }
}

fn resolve(index: &SchemaIndex<'_>, labels: &BTreeSet<Label>) -> Result<BTreeSet<usize>> {
    labels
        .iter()
        .map(|l| index.index_of(l).ok_or_else(|| Error::UnknownLabel(l.to_string())))
        .collect()
}

/// Approximate Steiner minimal tree over the schema containing every
/// terminal, with a `source -> sink` path valid under `mode`.
pub fn steiner_tree_pattern(
    schema: &SchemaGraph,
    terminals: &BTreeSet<Label>,
    source: &Label,
    sink: &Label,
    mode: EdgeMode,
) -> Result<GraphPattern> {
    if !terminals.contains(source) || !terminals.contains(sink) {
        return Err(Error::PreconditionViolation(
            "source and sink must be terminals".into(),
        ));
    }
    let index = SchemaIndex::new(schema);
    let ts = resolve(&index, terminals)?;
    let (s, t) = (index.index_of(source).unwrap(), index.index_of(sink).unwrap());
    let rule = match mode {
        EdgeMode::Undirected => PathRule::Weak,
        EdgeMode::Directed => PathRule::Directed,
    };
    let tree = solve_tree(&index, &ts, s, t, rule).ok_or_else(|| Error::Unconnectable {
        from: source.to_string(),
        to: sink.to_string(),
        terminals: join_labels(terminals),
    })?;
    Ok(to_pattern(&index, &tree, s, t))
}

/// One pattern (undirected) or pattern pair (directed) per combination of an
/// L_B label with an L_C label, each connecting the filter labels `l_f` as
/// well. Combinations are ordered by (L_B label, L_C label).
pub fn generate_pattern_pairs(
    schema: &SchemaGraph,
    l_f: &BTreeSet<Label>,
    l_b: &BTreeSet<Label>,
    l_c: &BTreeSet<Label>,
    mode: EdgeMode,
) -> Result<Vec<PatternPair>> {
    if l_b.is_empty() || l_c.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    if let Some(shared) = l_b.intersection(l_c).next() {
        return Err(Error::DisjointnessViolation(shared.to_string()));
    }
    let index = SchemaIndex::new(schema);
    let lf = resolve(&index, l_f)?;
    resolve(&index, l_b)?;
    resolve(&index, l_c)?;

    let rule = match mode {
        EdgeMode::Undirected => PathRule::Weak,
        EdgeMode::Directed => PathRule::Reversible,
    };
    let mut out = Vec::with_capacity(l_b.len() * l_c.len());
    for from in l_b {
        for to in l_c {
            let (b, c) = (index.index_of(from).unwrap(), index.index_of(to).unwrap());
            let mut terminals = lf.clone();
            terminals.insert(b);
            terminals.insert(c);
            let tree = solve_tree(&index, &terminals, c, b, rule).ok_or_else(|| {
                let mut names: BTreeSet<Label> = l_f.clone();
                names.insert(from.clone());
                names.insert(to.clone());
                Error::Unconnectable {
                    from: from.to_string(),
                    to: to.to_string(),
                    terminals: join_labels(&names),
                }
            })?;
            let left = to_pattern(&index, &tree, c, b);
            let right = match mode {
                EdgeMode::Undirected => None,
                EdgeMode::Directed => {
                    let mut edges = tree.edges.clone();
                    for w in tree.spine.windows(2) {
                        edges.remove(&(w[0], w[1]));
                        edges.insert((w[1], w[0]));
                    }
                    let reversed = IndexedTree {
                        vertices: tree.vertices.clone(),
                        edges,
                        spine: tree.spine.iter().rev().copied().collect(),
                    };
                    Some(to_pattern(&index, &reversed, b, c))
                }
            };
            out.push(PatternPair {
                from: from.clone(),
                to: to.clone(),
                left,
                right,
            });
        }
    }
    Ok(out)
}

/// Edge sets of every simple directed path `a -> b` within `edges`.
fn simple_paths(edges: &BTreeSet<(Label, Label)>, a: &Label, b: &Label) -> Vec<BTreeSet<(Label, Label)>> {
    fn walk<'e>(
        edges: &'e BTreeSet<(Label, Label)>,
        at: &'e Label,
        target: &Label,
        visited: &mut Vec<&'e Label>,
        used: &mut Vec<&'e (Label, Label)>,
        out: &mut Vec<BTreeSet<(Label, Label)>>,
    ) {
        if at == target {
            out.push(used.iter().map(|&e| e.clone()).collect());
            return;
        }
        for e in edges.iter().filter(|(x, _)| x == at) {
            if visited.contains(&&e.1) {
                continue;
            }
            visited.push(&e.1);
            used.push(e);
            walk(edges, &e.1, target, visited, used, out);
            used.pop();
            visited.pop();
        }
    }
    let mut out = Vec::new();
    walk(edges, a, b, &mut vec![a], &mut Vec::new(), &mut out);
    out
}

/// Whether two patterns are a pair: same vertices, and exactly one ordered
/// vertex pair (a, b) whose connecting path in `p1` appears reversed in `p2`
/// with every other edge shared.
pub fn is_pair(p1: &GraphPattern, p2: &GraphPattern) -> bool {
    if p1.vertices != p2.vertices {
        return false;
    }
    let reversed = |p: &BTreeSet<(Label, Label)>| -> BTreeSet<(Label, Label)> {
        p.iter().map(|(x, y)| (y.clone(), x.clone())).collect()
    };
    let mut witnesses = 0;
    for a in &p1.vertices {
        for b in &p1.vertices {
            if a == b {
                continue;
            }
            let found = simple_paths(&p1.edges, a, b).into_iter().any(|path| {
                let rev = reversed(&path);
                !path.is_subset(&p2.edges)
                    && !rev.is_subset(&p1.edges)
                    && rev.is_subset(&p2.edges)
                    && p1.edges.difference(&path).eq(p2.edges.difference(&rev))
            });
            if found {
                witnesses += 1;
            }
        }
    }
    witnesses == 1
}
