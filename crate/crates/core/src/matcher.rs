//! Label-homomorphic matching of tree patterns against the data graph.
//!
//! A pattern is rooted at one of its vertices and every pattern vertex gets a
//! candidate set (its label's vertices, narrowed to the filter when the label
//! is a filter label). A single bottom-up semi-join pass then keeps only the
//! candidates whose subtree can be completed. After that pass a root-to-leaf
//! join never dead-ends, so matches stream out in lexicographic order without
//! backtracking.

use std::collections::BTreeSet;

use crate::model::{filter_labels, EdgeMode, Filter, Label, LabeledGraph, VertexId};
use crate::pattern::GraphPattern;

/// How to step from a parent binding to a child binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    Out,
    In,
    Both,
}

pub(crate) fn for_each_neighbor(g: &LabeledGraph, v: u32, step: Step, mut f: impl FnMut(u32)) {
    match step {
        Step::Out => g.out_neighbors(v).iter().copied().for_each(f),
        Step::In => g.in_neighbors(v).iter().copied().for_each(f),
        Step::Both => {
            g.out_neighbors(v).iter().copied().for_each(&mut f);
            g.in_neighbors(v).iter().copied().for_each(f);
        }
    }
}

fn any_neighbor(g: &LabeledGraph, v: u32, step: Step, mut pred: impl FnMut(u32) -> bool) -> bool {
    match step {
        Step::Out => g.out_neighbors(v).iter().any(|&w| pred(w)),
        Step::In => g.in_neighbors(v).iter().any(|&w| pred(w)),
        Step::Both => {
            g.out_neighbors(v).iter().any(|&w| pred(w)) || g.in_neighbors(v).iter().any(|&w| pred(w))
        }
    }
}

/// Sorted, deduplicated neighbors.
fn sorted_neighbors(g: &LabeledGraph, v: u32, step: Step) -> Vec<u32> {
    match step {
        Step::Out => g.out_neighbors(v).to_vec(),
        Step::In => g.in_neighbors(v).to_vec(),
        Step::Both => {
            let mut all: Vec<u32> = g.out_neighbors(v).iter().chain(g.in_neighbors(v)).copied().collect();
            all.sort_unstable();
            all.dedup();
            all
        }
    }
}

/// A pattern rooted at one vertex, with semi-join-reduced candidate sets.
pub(crate) struct JoinPlan<'p> {
    /// Pattern vertex labels in breadth-first order from the root.
    pub nodes: Vec<&'p Label>,
    /// Parent position and the step from parent to this node.
    pub parent: Vec<Option<(usize, Step)>>,
    pub viable: Vec<Vec<bool>>,
    pub candidates: Vec<Vec<u32>>,
}

impl<'p> JoinPlan<'p> {
    /// `None` when some pattern label is absent from the graph (no match is
    /// possible) or the root is not a pattern vertex.
    pub(crate) fn build(
        g: &LabeledGraph,
        pattern: &'p GraphPattern,
        root: &Label,
        filter_mask: &[bool],
        filter_labels: &BTreeSet<Label>,
        mode: EdgeMode,
    ) -> Option<Self> {
        let root = pattern.vertices.get(root)?;
        let mut nodes: Vec<&Label> = vec![root];
        let mut parent = vec![None];
        let mut i = 0;
        while i < nodes.len() {
            let v = nodes[i];
            let mut kids: Vec<(&Label, bool)> = pattern
                .incident(v)
                .filter(|(w, _)| !nodes.contains(w))
                .collect();
            kids.sort();
            for (w, forward) in kids {
                let step = match (mode, forward) {
                    (EdgeMode::Undirected, _) => Step::Both,
                    (EdgeMode::Directed, true) => Step::Out,
                    (EdgeMode::Directed, false) => Step::In,
                };
                nodes.push(w);
                parent.push(Some((i, step)));
            }
            i += 1;
        }

        let n = g.vertex_count();
        let mut viable = Vec::with_capacity(nodes.len());
        for label in &nodes {
            let l = g.label_index(label.as_str())?;
            let restrict = filter_labels.contains(*label);
            let mut mask = vec![false; n];
            for &v in g.vertices_with_label(l) {
                if !restrict || filter_mask[v as usize] {
                    mask[v as usize] = true;
                }
            }
            viable.push(mask);
        }

        // Bottom-up: a candidate survives if each child has a surviving
        // neighbor along the child's step.
        for child in (1..nodes.len()).rev() {
            let (p, step) = parent[child].unwrap();
            let l = g.label_index(nodes[p].as_str()).unwrap();
            for &v in g.vertices_with_label(l) {
                if viable[p][v as usize] {
                    let keep = any_neighbor(g, v, step, |w| viable[child][w as usize]);
                    viable[p][v as usize] = keep;
                }
            }
        }

        let candidates = nodes
            .iter()
            .zip(&viable)
            .map(|(label, mask)| {
                let l = g.label_index(label.as_str()).unwrap();
                g.vertices_with_label(l)
                    .iter()
                    .copied()
                    .filter(|&v| mask[v as usize])
                    .collect()
            })
            .collect();

        Some(JoinPlan {
            nodes,
            parent,
            viable,
            candidates,
        })
    }

    pub(crate) fn position(&self, label: &Label) -> Option<usize> {
        self.nodes.iter().position(|&l| l == label)
    }

    /// Positions from the root down to `target`.
    pub(crate) fn chain_to(&self, target: usize) -> Vec<usize> {
        let mut chain = vec![target];
        let mut at = target;
        while let Some((p, _)) = self.parent[at] {
            chain.push(p);
            at = p;
        }
        chain.reverse();
        chain
    }
}

/// One concrete realization of a pattern in the data graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    /// Pattern label to bound vertex, in join order (root first).
    pub bindings: Vec<(Label, VertexId)>,
    /// Data edges realizing the pattern edges, in their original direction.
    pub edges: BTreeSet<(VertexId, VertexId)>,
    pub mode: EdgeMode,
}

impl Match {
    pub fn binding(&self, label: &Label) -> Option<&VertexId> {
        self.bindings.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }

    pub fn vertices(&self) -> BTreeSet<&VertexId> {
        self.bindings.iter().map(|(_, v)| v).collect()
    }

    /// Binding ids in join order; the sort key of the match stream.
    pub fn key(&self) -> Vec<&VertexId> {
        self.bindings.iter().map(|(_, v)| v).collect()
    }

    fn has_path(&self, from: &VertexId, to: &VertexId) -> bool {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for (a, b) in &self.edges {
                let next = if a == v {
                    Some(b)
                } else if b == v && self.mode.is_undirected() {
                    Some(a)
                } else {
                    None
                };
                if let Some(w) = next {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        false
    }
}

/// Lazy, lexicographically ordered stream of matches.
pub struct Matches<'a> {
    g: &'a LabeledGraph,
    pattern: &'a GraphPattern,
    plan: Option<JoinPlan<'a>>,
    mode: EdgeMode,
    levels: Vec<Vec<u32>>,
    pos: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> Matches<'a> {
    fn fill_from(&mut self, depth: usize) {
        let plan = self.plan.as_ref().unwrap();
        for d in depth..plan.nodes.len() {
            let (p, step) = plan.parent[d].unwrap();
            let bound = self.levels[p][self.pos[p]];
            let next: Vec<u32> = sorted_neighbors(self.g, bound, step)
                .into_iter()
                .filter(|&w| plan.viable[d][w as usize])
                .collect();
            debug_assert!(!next.is_empty(), "semi-join leaves no dead ends");
            self.levels[d] = next;
            self.pos[d] = 0;
        }
    }

    fn emit(&self) -> Match {
        let plan = self.plan.as_ref().unwrap();
        let bound: Vec<u32> = (0..plan.nodes.len()).map(|d| self.levels[d][self.pos[d]]).collect();
        let bindings = plan
            .nodes
            .iter()
            .zip(&bound)
            .map(|(&l, &v)| (l.clone(), self.g.id(v).clone()))
            .collect();
        let mut edges = BTreeSet::new();
        for (a, b) in &self.pattern.edges {
            let (pa, pb) = (plan.position(a).unwrap(), plan.position(b).unwrap());
            let (va, vb) = (self.g.id(bound[pa]), self.g.id(bound[pb]));
            if self.g.has_edge(va.as_str(), vb.as_str()) {
                edges.insert((va.clone(), vb.clone()));
            }
            if self.mode.is_undirected() && self.g.has_edge(vb.as_str(), va.as_str()) {
                edges.insert((vb.clone(), va.clone()));
            }
        }
        Match {
            bindings,
            edges,
            mode: self.mode,
        }
    }
}

impl Iterator for Matches<'_> {
    type Item = Match;

    fn next(&mut self) -> Option<Match> {
        if self.done {
            return None;
        }
        let Some(plan) = self.plan.as_ref() else {
            self.done = true;
            return None;
        };
        let k = plan.nodes.len();
        if !self.started {
            self.started = true;
            if plan.candidates[0].is_empty() {
                self.done = true;
                return None;
            }
            self.levels = vec![Vec::new(); k];
            self.pos = vec![0; k];
            self.levels[0] = plan.candidates[0].clone();
            self.fill_from(1);
            return Some(self.emit());
        }
        let mut d = k - 1;
        loop {
            self.pos[d] += 1;
            if self.pos[d] < self.levels[d].len() {
                break;
            }
            if d == 0 {
                self.done = true;
                return None;
            }
            d -= 1;
        }
        self.fill_from(d + 1);
        Some(self.emit())
    }
}

/// Every match of `pattern` in `g` whose filter-labeled vertices lie in `f`,
/// ordered lexicographically by binding ids (root = pattern source first).
pub fn enumerate_matches<'a>(
    g: &'a LabeledGraph,
    pattern: &'a GraphPattern,
    f: &Filter,
    mode: EdgeMode,
) -> Matches<'a> {
    let lf = filter_labels(g, f);
    let plan = JoinPlan::build(g, pattern, &pattern.source, &f.mask(g), &lf, mode);
    Matches {
        g,
        pattern,
        plan,
        mode,
        levels: Vec::new(),
        pos: Vec::new(),
        started: false,
        done: false,
    }
}

/// Endpoint pairs (u, b) with u bound to `from_label`, b bound to `to_label`
/// and a path u -> ... -> b inside the match instance.
pub fn terminal_path_endpoints(
    m: &Match,
    from_label: &Label,
    to_label: &Label,
) -> BTreeSet<(VertexId, VertexId)> {
    let mut out = BTreeSet::new();
    if let (Some(u), Some(b)) = (m.binding(from_label), m.binding(to_label)) {
        if m.has_path(u, b) {
            out.insert((u.clone(), b.clone()));
        }
    }
    out
}
