//! Views: projections of the data graph onto L_C vertices, linked through
//! shared L_B "bridge" vertices.
//!
//! For every pattern generated for an (L_B, L_C) label combination the
//! pattern is rooted at its L_C terminal, reduced against the graph, and the
//! (c, b) binding pairs are read off along the root-to-b chain. Supports are
//! unions of those pairs; no match is ever materialized.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcher::{for_each_neighbor, JoinPlan};
use crate::model::{filter_labels, EdgeMode, Filter, Label, LabeledGraph, VertexId};
use crate::pattern::{generate_pattern_pairs, GraphPattern};

/// Unordered pair of distinct view vertices, stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ViewEdge {
    pub u: VertexId,
    pub v: VertexId,
}

impl ViewEdge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            ViewEdge { u: a, v: b }
        } else {
            ViewEdge { u: b, v: a }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    pub l_c: BTreeSet<Label>,
    pub l_b: BTreeSet<Label>,
    pub filter: Filter,
    /// C_q: the view's vertices.
    pub c_q: BTreeSet<VertexId>,
    /// B_q: bridge vertices.
    pub b_q: BTreeSet<VertexId>,
    /// υ_q, defined on every member of `c_q` (possibly empty).
    pub vertex_support: BTreeMap<VertexId, BTreeSet<VertexId>>,
    /// ε_q; its keys are E_q.
    pub edge_support: BTreeMap<ViewEdge, BTreeSet<VertexId>>,
}

impl View {
    pub fn l_q(&self) -> BTreeSet<Label> {
        self.l_c.union(&self.l_b).cloned().collect()
    }

    pub fn e_q(&self) -> impl Iterator<Item = &ViewEdge> {
        self.edge_support.keys()
    }

    pub fn support(&self, u: &str) -> Option<&BTreeSet<VertexId>> {
        self.vertex_support.get(u)
    }

    /// Checks the structural invariants; the error names the first failure.
    pub fn check(&self, g: &LabeledGraph) -> std::result::Result<(), String> {
        for u in &self.c_q {
            let l = g.label_of(u.as_str()).ok_or(format!("unknown vertex {u}"))?;
            if !self.l_c.contains(l) {
                return Err(format!("{u} not labeled from L_C"));
            }
            if !self.vertex_support.contains_key(u) {
                return Err(format!("{u} has no support entry"));
            }
        }
        for b in &self.b_q {
            let l = g.label_of(b.as_str()).ok_or(format!("unknown vertex {b}"))?;
            if !self.l_b.contains(l) {
                return Err(format!("{b} not labeled from L_B"));
            }
        }
        if self.vertex_support.len() != self.c_q.len() {
            return Err("support defined outside C_q".into());
        }
        for (u, s) in &self.vertex_support {
            if !s.is_subset(&self.b_q) {
                return Err(format!("support of {u} leaves B_q"));
            }
        }
        for (e, s) in &self.edge_support {
            if s.is_empty() {
                return Err(format!("edge {}-{} with empty support", e.u, e.v));
            }
            if e.u >= e.v {
                return Err("edge not normalized".into());
            }
            if !self.c_q.contains(&e.u) || !self.c_q.contains(&e.v) {
                return Err(format!("edge {}-{} leaves C_q", e.u, e.v));
            }
            for b in s {
                if !self.vertex_support[&e.u].contains(b) || !self.vertex_support[&e.v].contains(b) {
                    return Err(format!("edge bridge {b} missing from endpoint support"));
                }
            }
        }
        Ok(())
    }
}

fn check_label_sets(g: &LabeledGraph, l_c: &BTreeSet<Label>, l_b: &BTreeSet<Label>) -> Result<()> {
    if l_c.is_empty() || l_b.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    g.check_labels(l_c.iter().chain(l_b))?;
    let shared: Vec<String> = l_c.intersection(l_b).map(|l| l.to_string()).collect();
    if !shared.is_empty() {
        return Err(Error::DisjointnessViolation(shared.join(",")));
    }
    Ok(())
}

/// (c, reachable b's) for every surviving root candidate of `plan`.
fn project(g: &LabeledGraph, plan: &JoinPlan<'_>, b_pos: usize, stamp: &mut [u32], epoch: &mut u32) -> Vec<(u32, Vec<u32>)> {
    let chain = plan.chain_to(b_pos);
    let mut out = Vec::with_capacity(plan.candidates[0].len());
    let mut frontier = Vec::new();
    let mut next = Vec::new();
    for &c in &plan.candidates[0] {
        frontier.clear();
        frontier.push(c);
        for &node in &chain[1..] {
            let (_, step) = plan.parent[node].unwrap();
            *epoch += 1;
            let e = *epoch;
            next.clear();
            for &v in &frontier {
                for_each_neighbor(g, v, step, |w| {
                    if plan.viable[node][w as usize] && stamp[w as usize] != e {
                        stamp[w as usize] = e;
                        next.push(w);
                    }
                });
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        if !frontier.is_empty() {
            let mut bs = frontier.clone();
            bs.sort_unstable();
            out.push((c, bs));
        }
    }
    out
}

/// Pair supports for one pattern: (c binding, b binding) over all matches.
#[allow(clippy::too_many_arguments)]
fn pattern_pairs(
    g: &LabeledGraph,
    pattern: &GraphPattern,
    c_label: &Label,
    b_label: &Label,
    filter_mask: &[bool],
    lf: &BTreeSet<Label>,
    mode: EdgeMode,
    stamp: &mut [u32],
    epoch: &mut u32,
) -> Vec<(u32, Vec<u32>)> {
    let Some(plan) = JoinPlan::build(g, pattern, c_label, filter_mask, lf, mode) else {
        return Vec::new();
    };
    let b_pos = plan.position(b_label).expect("pattern contains its terminals");
    project(g, &plan, b_pos, stamp, epoch)
}

/// Builds the view for state (F, L_C, L_B).
pub fn gen_view(
    g: &LabeledGraph,
    f: &Filter,
    l_c: &BTreeSet<Label>,
    l_b: &BTreeSet<Label>,
    mode: EdgeMode,
) -> Result<View> {
    check_label_sets(g, l_c, l_b)?;
    f.validate(g)?;
    let lf = filter_labels(g, f);
    let pairs = generate_pattern_pairs(g.schema(), &lf, l_b, l_c, mode)?;
    let mask = f.mask(g);
    let n = g.vertex_count();

    // C_q: the selected L_C vertices, or every L_C vertex when none is selected.
    let mut in_c = vec![false; n];
    let mut selected_c = false;
    for m in f.iter() {
        let v = g.vertex_index(m.as_str()).unwrap();
        if l_c.contains(g.label_at(g.label_idx_of(v))) {
            in_c[v as usize] = true;
            selected_c = true;
        }
    }
    if !selected_c {
        for l in l_c {
            for &v in g.vertices_with_label(g.label_index(l.as_str()).unwrap()) {
                in_c[v as usize] = true;
            }
        }
    }

    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;
    // down: path c -> b (left patterns); up: path b -> c (right patterns).
    let mut down: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut up: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut in_b = vec![false; n];
    for pair in &pairs {
        let mut collect = |pattern: &GraphPattern, into: &mut HashMap<u32, Vec<u32>>| {
            for (c, bs) in pattern_pairs(g, pattern, &pair.to, &pair.from, &mask, &lf, mode, &mut stamp, &mut epoch) {
                for &b in &bs {
                    in_b[b as usize] = true;
                }
                if in_c[c as usize] {
                    into.entry(c).or_default().extend(bs);
                }
            }
        };
        collect(&pair.left, &mut down);
        if let Some(right) = &pair.right {
            collect(right, &mut up);
        }
    }
    for list in down.values_mut().chain(up.values_mut()) {
        list.sort_unstable();
        list.dedup();
    }

    let id = |v: u32| g.id(v).clone();
    let mut vertex_support: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for v in (0..n as u32).filter(|&v| in_c[v as usize]) {
        let mut s: BTreeSet<VertexId> = BTreeSet::new();
        for list in [down.get(&v), up.get(&v)].into_iter().flatten() {
            s.extend(list.iter().map(|&b| id(b)));
        }
        vertex_support.insert(id(v), s);
    }

    // Edges through shared bridges.
    let mut by_bridge_down: HashMap<u32, Vec<u32>> = HashMap::new();
    for (&c, bs) in &down {
        for &b in bs {
            by_bridge_down.entry(b).or_default().push(c);
        }
    }
    let mut edge_acc: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    match mode {
        EdgeMode::Undirected => {
            for (&b, cs) in &by_bridge_down {
                for (i, &u) in cs.iter().enumerate() {
                    for &v in &cs[i + 1..] {
                        edge_acc.entry((u.min(v), u.max(v))).or_default().push(b);
                    }
                }
            }
        }
        EdgeMode::Directed => {
            let mut by_bridge_up: HashMap<u32, Vec<u32>> = HashMap::new();
            for (&c, bs) in &up {
                for &b in bs {
                    by_bridge_up.entry(b).or_default().push(c);
                }
            }
            for (&b, us) in &by_bridge_down {
                if let Some(vs) = by_bridge_up.get(&b) {
                    for &u in us {
                        for &v in vs.iter().filter(|&&v| v != u) {
                            edge_acc.entry((u.min(v), u.max(v))).or_default().push(b);
                        }
                    }
                }
            }
        }
    }
    let edge_support = edge_acc
        .into_iter()
        .map(|((u, v), bs)| (ViewEdge::new(id(u), id(v)), bs.into_iter().map(id).collect()))
        .collect();

    Ok(View {
        l_c: l_c.clone(),
        l_b: l_b.clone(),
        filter: f.clone(),
        c_q: vertex_support.keys().cloned().collect(),
        b_q: (0..n as u32).filter(|&v| in_b[v as usize]).map(id).collect(),
        vertex_support,
        edge_support,
    })
}

/// A view with aggregated weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedView {
    pub view: View,
    pub vertex_weight: BTreeMap<VertexId, u64>,
    pub edge_weight: BTreeMap<ViewEdge, u64>,
}

/// Weights from support-set cardinalities.
pub fn weigh(view: View) -> WeightedView {
    weigh_with(view, |s| s.len() as u64)
}

pub fn weigh_with(view: View, aggregate: impl Fn(&BTreeSet<VertexId>) -> u64) -> WeightedView {
    let vertex_weight = view
        .vertex_support
        .iter()
        .map(|(u, s)| (u.clone(), aggregate(s)))
        .collect();
    let edge_weight = view
        .edge_support
        .iter()
        .map(|(e, s)| (e.clone(), aggregate(s)))
        .collect();
    WeightedView {
        view,
        vertex_weight,
        edge_weight,
    }
}

/// Drops every view vertex whose support is empty.
pub fn minimal_view(view: &View) -> View {
    let mut out = view.clone();
    out.vertex_support.retain(|_, s| !s.is_empty());
    out.c_q = out.vertex_support.keys().cloned().collect();
    out
}

/// Filter members outside the given labels.
fn outside(g: &LabeledGraph, f: &Filter, labels: &BTreeSet<Label>) -> BTreeSet<VertexId> {
    f.iter()
        .filter(|m| g.label_of(m.as_str()).is_some_and(|l| !labels.contains(l)))
        .cloned()
        .collect()
}

/// Whether every vertex present in only one of the two views has empty
/// support. Both views must share (L_C, L_B) and agree on filter members
/// outside L_C.
pub fn vis_equivalent(g: &LabeledGraph, v1: &View, v2: &View) -> Result<bool> {
    if v1.l_c != v2.l_c || v1.l_b != v2.l_b {
        return Err(Error::PreconditionViolation("views built over different labels".into()));
    }
    if outside(g, &v1.filter, &v1.l_c) != outside(g, &v2.filter, &v2.l_c) {
        return Err(Error::PreconditionViolation(
            "filters differ outside L_C".into(),
        ));
    }
    let empty = |v: &View, u: &VertexId| v.vertex_support.get(u).is_none_or(|s| s.is_empty());
    Ok(v1.c_q.difference(&v2.c_q).all(|u| empty(v1, u)) && v2.c_q.difference(&v1.c_q).all(|u| empty(v2, u)))
}
