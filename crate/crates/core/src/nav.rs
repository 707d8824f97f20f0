//! Navigation states, the selection/expansion/navigation operators, and the
//! navigation history graph.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use indexmap::IndexSet;
use num_bigint::BigUint;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{EdgeMode, Filter, Label, LabeledGraph, VertexId};
use crate::view::{gen_view, minimal_view, View};

/// A point in the navigation space: (F, L_C, L_B).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NavState {
    pub filter: Filter,
    pub l_c: BTreeSet<Label>,
    pub l_b: BTreeSet<Label>,
}

fn check_pair(l_c: &BTreeSet<Label>, l_b: &BTreeSet<Label>) -> Result<()> {
    if l_c.is_empty() || l_b.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let shared: Vec<String> = l_c.intersection(l_b).map(|l| l.to_string()).collect();
    if shared.is_empty() {
        Ok(())
    } else {
        Err(Error::DisjointnessViolation(shared.join(",")))
    }
}

fn csv<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl NavState {
    pub fn new(filter: Filter, l_c: BTreeSet<Label>, l_b: BTreeSet<Label>) -> Result<Self> {
        check_pair(&l_c, &l_b)?;
        Ok(NavState { filter, l_c, l_b })
    }

    /// Entry state: empty filter over the given labels.
    pub fn entry(l_c: BTreeSet<Label>, l_b: BTreeSet<Label>) -> Result<Self> {
        Self::new(Filter::empty(), l_c, l_b)
    }

    pub fn validate(&self, g: &LabeledGraph) -> Result<()> {
        check_pair(&self.l_c, &self.l_b)?;
        g.check_labels(self.l_c.iter().chain(&self.l_b))?;
        self.filter.validate(g)
    }

    /// F restricted to vertices labeled from `labels`.
    pub fn filter_within(&self, g: &LabeledGraph, labels: &BTreeSet<Label>) -> BTreeSet<VertexId> {
        self.filter
            .iter()
            .filter(|m| g.label_of(m.as_str()).is_some_and(|l| labels.contains(l)))
            .cloned()
            .collect()
    }

    pub fn view(&self, g: &LabeledGraph, mode: EdgeMode) -> Result<View> {
        gen_view(g, &self.filter, &self.l_c, &self.l_b, mode)
    }

    fn table_fields(&self) -> String {
        format!(
            "F={} LC={} LB={}",
            csv(self.filter.iter()),
            csv(&self.l_c),
            csv(&self.l_b)
        )
    }

    /// Short content hash identifying the state in history exports.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.table_fields().as_bytes());
        digest.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

impl fmt::Display for NavState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({{{}}}, {{{}}}, {{{}}})",
            csv(self.filter.iter()),
            csv(&self.l_c),
            csv(&self.l_b)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Selection,
    Expansion,
    Navigation,
}

impl OpKind {
    pub fn symbol(self) -> &'static str {
        match self {
            OpKind::Selection => "sigma",
            OpKind::Expansion => "xi",
            OpKind::Navigation => "eta",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sigma" => Ok(OpKind::Selection),
            "xi" => Ok(OpKind::Expansion),
            "eta" => Ok(OpKind::Navigation),
            other => Err(format!("unknown operator `{other}`")),
        }
    }
}

/// An operator invocation with its payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operation {
    Select(BTreeSet<VertexId>),
    Expand(BTreeSet<Label>),
    Navigate {
        l_c: BTreeSet<Label>,
        l_b: BTreeSet<Label>,
    },
}

impl Operation {
    pub fn kind(&self) -> OpKind {
        match self {
            Operation::Select(_) => OpKind::Selection,
            Operation::Expand(_) => OpKind::Expansion,
            Operation::Navigate { .. } => OpKind::Navigation,
        }
    }
}

/// The filter produced by selecting `f_select` in state `s`.
fn selected_filter(g: &LabeledGraph, s: &NavState, f_select: &BTreeSet<VertexId>) -> Filter {
    let mut members = if s.filter.members.is_disjoint(f_select) {
        s.filter.members.clone()
    } else {
        let own = s.filter_within(g, &s.l_c);
        s.filter.members.difference(&own).cloned().collect()
    };
    members.extend(f_select.iter().cloned());
    Filter::from_members(members)
}

/// σ against an already computed view of `s`. Every selected vertex must be
/// visible in that view's minimal form.
pub fn select_in_view(
    g: &LabeledGraph,
    s: &NavState,
    view: &View,
    f_select: &BTreeSet<VertexId>,
) -> Result<NavState> {
    if f_select.is_empty() {
        return Err(Error::EmptySelection);
    }
    let visible = minimal_view(view);
    if let Some(hidden) = f_select.iter().find(|v| !visible.c_q.contains(*v)) {
        return Err(Error::SelectionOutsideView(hidden.to_string()));
    }
    Ok(NavState {
        filter: selected_filter(g, s, f_select),
        l_c: s.l_c.clone(),
        l_b: s.l_b.clone(),
    })
}

/// σ: add vertices selected in the current minimal view to the filter.
pub fn select(g: &LabeledGraph, s: &NavState, f_select: &BTreeSet<VertexId>, mode: EdgeMode) -> Result<NavState> {
    if f_select.is_empty() {
        return Err(Error::EmptySelection);
    }
    let view = s.view(g, mode)?;
    select_in_view(g, s, &view, f_select)
}

/// ξ: switch to `l_c_new`, dropping filter members labeled from it.
pub fn expand(g: &LabeledGraph, s: &NavState, l_c_new: &BTreeSet<Label>) -> Result<NavState> {
    check_pair(l_c_new, &s.l_b)?;
    g.check_labels(l_c_new)?;
    let own = s.filter_within(g, l_c_new);
    Ok(NavState {
        filter: Filter::from_members(s.filter.members.difference(&own).cloned().collect()),
        l_c: l_c_new.clone(),
        l_b: s.l_b.clone(),
    })
}

/// η: move to other labels, carrying the filter unchanged.
pub fn navigate(
    g: &LabeledGraph,
    s: &NavState,
    l_c_new: &BTreeSet<Label>,
    l_b_new: &BTreeSet<Label>,
) -> Result<NavState> {
    check_pair(l_c_new, l_b_new)?;
    g.check_labels(l_c_new.iter().chain(l_b_new))?;
    Ok(NavState {
        filter: s.filter.clone(),
        l_c: l_c_new.clone(),
        l_b: l_b_new.clone(),
    })
}

/// Size of the navigation space: 2^n · (3^m − 2^(m+1) + 1).
pub fn nav_state_count(n: u32, m: u32) -> BigUint {
    let filters = BigUint::from(2u32).pow(n);
    let label_pairs = BigUint::from(3u32).pow(m) + 1u32 - BigUint::from(2u32).pow(m + 1);
    filters * label_pairs
}

pub const ENUMERATION_MAX_VERTICES: usize = 12;
pub const ENUMERATION_MAX_LABELS: usize = 4;

/// Every (F, L_C, L_B) with F ⊆ V and L_C, L_B nonempty and disjoint.
pub fn enumerate_nav_states(g: &LabeledGraph) -> Result<Vec<NavState>> {
    let (n, m) = (g.vertex_count(), g.label_count());
    if n > ENUMERATION_MAX_VERTICES || m > ENUMERATION_MAX_LABELS {
        return Err(Error::TooLarge { vertices: n, labels: m });
    }
    let vertices: Vec<&VertexId> = g.vertices().collect();
    let labels = g.labels();

    let mut label_pairs = Vec::new();
    for code in 0..3usize.pow(m as u32) {
        let (mut l_c, mut l_b) = (BTreeSet::new(), BTreeSet::new());
        let mut rest = code;
        for l in labels {
            match rest % 3 {
                1 => {
                    l_c.insert(l.clone());
                }
                2 => {
                    l_b.insert(l.clone());
                }
                _ => {}
            }
            rest /= 3;
        }
        if !l_c.is_empty() && !l_b.is_empty() {
            label_pairs.push((l_c, l_b));
        }
    }

    let mut out = Vec::with_capacity((1 << n) * label_pairs.len());
    for bits in 0..1usize << n {
        let filter = Filter::from_members(
            (0..n)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| vertices[i].clone())
                .collect(),
        );
        for (l_c, l_b) in &label_pairs {
            out.push(NavState {
                filter: filter.clone(),
                l_c: l_c.clone(),
                l_b: l_b.clone(),
            });
        }
    }
    Ok(out)
}

/// One recorded transition, by state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub from: usize,
    pub to: usize,
    pub op: OpKind,
}

/// Recovers the selection that takes `from` to `to`, if σ can.
pub fn selection_between(g: &LabeledGraph, from: &NavState, to: &NavState) -> Option<BTreeSet<VertexId>> {
    if from.l_c != to.l_c || from.l_b != to.l_b {
        return None;
    }
    let (f1, f2) = (&from.filter.members, &to.filter.members);
    let candidate: BTreeSet<VertexId> = if f1.is_subset(f2) && f1 != f2 {
        f2.difference(f1).cloned().collect()
    } else {
        to.filter_within(g, &to.l_c)
    };
    let all_c = candidate
        .iter()
        .all(|v| g.label_of(v.as_str()).is_some_and(|l| to.l_c.contains(l)));
    if candidate.is_empty() || !all_c {
        return None;
    }
    (selected_filter(g, from, &candidate) == to.filter).then_some(candidate)
}

/// The visited part of the navigation graph: distinct states in first-visit
/// order and the steps between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NavGraph {
    states: IndexSet<NavState>,
    steps: Vec<Step>,
}

impl NavGraph {
    pub fn new(entry: NavState) -> Self {
        NavGraph {
            states: IndexSet::from([entry]),
            steps: Vec::new(),
        }
    }

    pub fn states(&self) -> &IndexSet<NavState> {
        &self.states
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn state(&self, i: usize) -> &NavState {
        &self.states[i]
    }

    pub fn entry(&self) -> &NavState {
        &self.states[0]
    }

    /// Target of the last step, or the entry state.
    pub fn current(&self) -> &NavState {
        match self.steps.last() {
            Some(s) => &self.states[s.to],
            None => self.entry(),
        }
    }

    /// Appends a step after checking the operator's defining condition.
    pub fn record_step(&mut self, g: &LabeledGraph, from: &NavState, to: &NavState, op: OpKind) -> Result<()> {
        let illegal = |reason: String| Error::IllegalStep {
            op: op.symbol(),
            reason,
        };
        let from_idx = self
            .states
            .get_index_of(from)
            .ok_or_else(|| illegal("source state not in history".into()))?;
        to.validate(g).map_err(|e| illegal(e.to_string()))?;
        match op {
            OpKind::Selection => {
                if from.l_c != to.l_c || from.l_b != to.l_b {
                    return Err(illegal("selection must keep L_C and L_B".into()));
                }
                if selection_between(g, from, to).is_none() {
                    return Err(illegal("filter change is not a selection of L_C vertices".into()));
                }
            }
            OpKind::Expansion => {
                if from.l_b != to.l_b {
                    return Err(illegal("expansion must keep L_B".into()));
                }
                let own = from.filter_within(g, &to.l_c);
                let expected: BTreeSet<VertexId> = from.filter.members.difference(&own).cloned().collect();
                if expected != to.filter.members {
                    return Err(illegal("filter must equal F minus its new-L_C members".into()));
                }
            }
            OpKind::Navigation => {
                if from.filter != to.filter {
                    return Err(illegal("navigation must keep F".into()));
                }
            }
        }
        let (to_idx, _) = self.states.insert_full(to.clone());
        self.steps.push(Step {
            from: from_idx,
            to: to_idx,
            op,
        });
        Ok(())
    }

    /// The history as an alternating state/operator walk, when the steps
    /// chain (each step leaves from the previous step's target).
    pub fn walk(&self) -> Option<Vec<WalkItem<'_>>> {
        let mut items = vec![WalkItem::State(self.entry())];
        let mut at = 0;
        for s in &self.steps {
            if s.from != at {
                return None;
            }
            items.push(WalkItem::Op(s.op));
            items.push(WalkItem::State(&self.states[s.to]));
            at = s.to;
        }
        Some(items)
    }

    /// Text export: a state table followed by one line per step.
    pub fn export(&self) -> String {
        let mut out = String::from("# states\n");
        for s in &self.states {
            let _ = writeln!(out, "{} {}", s.hash(), s.table_fields());
        }
        out.push_str("# steps\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.states[s.from].hash(),
                s.op,
                self.states[s.to].hash()
            );
        }
        out
    }

    /// Parses an export without checking steps against a graph; use
    /// [`crate::Navigator::replay`] to re-execute it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut states: IndexSet<NavState> = IndexSet::new();
        let mut hashes: Vec<String> = Vec::new();
        let mut steps = Vec::new();
        let mut section = "";
        let err = |line: usize, message: String| Error::Parse { line, message };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(h) = t.strip_prefix('#') {
                section = match h.trim() {
                    "states" => "states",
                    "steps" => "steps",
                    _ => section,
                };
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            match section {
                "states" => {
                    let [hash, f, lc, lb] = parts[..] else {
                        return Err(err(line, "expected `<hash> F=.. LC=.. LB=..`".into()));
                    };
                    let field = |tok: &str, key: &str| -> Result<Vec<String>> {
                        let v = tok
                            .strip_prefix(key)
                            .ok_or_else(|| err(line, format!("expected {key}")))?;
                        Ok(v.split(',').filter(|x| !x.is_empty()).map(String::from).collect())
                    };
                    let state = NavState {
                        filter: Filter::from_members(field(f, "F=")?.into_iter().map(VertexId::from).collect()),
                        l_c: field(lc, "LC=")?.into_iter().map(Label::from).collect(),
                        l_b: field(lb, "LB=")?.into_iter().map(Label::from).collect(),
                    };
                    if state.hash() != hash {
                        return Err(err(line, format!("hash {hash} does not match state")));
                    }
                    if !states.insert(state) {
                        return Err(err(line, "duplicate state".into()));
                    }
                    hashes.push(hash.to_string());
                }
                "steps" => {
                    let [a, op, b] = parts[..] else {
                        return Err(err(line, "expected `<hash> <op> <hash>`".into()));
                    };
                    let find = |h: &str| {
                        hashes
                            .iter()
                            .position(|x| x == h)
                            .ok_or_else(|| err(line, format!("unknown state {h}")))
                    };
                    steps.push(Step {
                        from: find(a)?,
                        to: find(b)?,
                        op: op.parse().map_err(|e| err(line, e))?,
                    });
                }
                _ => return Err(err(line, "content before `# states`".into())),
            }
        }
        if states.is_empty() {
            return Err(err(0, "history has no states".into()));
        }
        Ok(NavGraph { states, steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkItem<'a> {
    State(&'a NavState),
    Op(OpKind),
}

impl fmt::Display for WalkItem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkItem::State(s) => s.fmt(f),
            WalkItem::Op(op) => op.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixtures::g0, id_set, label_set};

    fn state(g: &LabeledGraph, f: &[&str], lc: &str, lb: &str) -> NavState {
        NavState::new(Filter::new(g, f.iter().copied()).unwrap(), label_set([lc]), label_set([lb])).unwrap()
    }

    #[test]
    fn select_disjoint_branch() {
        let g = g0();
        let s = state(&g, &["x1"], "Z", "Y");
        let t = select(&g, &s, &id_set(["z1"]), EdgeMode::Undirected).unwrap();
        assert_eq!(t.filter.members, id_set(["x1", "z1"]));
        assert_eq!((t.l_c.clone(), t.l_b.clone()), (s.l_c.clone(), s.l_b.clone()));
    }

    #[test]
    fn select_overlapping_branch() {
        let g = g0();
        let s = state(&g, &["x1", "z1"], "Z", "Y");
        let t = select(&g, &s, &id_set(["z1"]), EdgeMode::Undirected).unwrap();
        assert_eq!(t.filter.members, id_set(["x1", "z1"]));
    }

    #[test]
    fn select_hidden_vertex() {
        let g = g0();
        let s = state(&g, &["x1"], "Z", "Y");
        assert_eq!(
            select(&g, &s, &id_set(["z2"]), EdgeMode::Undirected).unwrap_err(),
            Error::SelectionOutsideView("z2".into())
        );
        assert_eq!(
            select(&g, &s, &BTreeSet::new(), EdgeMode::Undirected).unwrap_err(),
            Error::EmptySelection
        );
    }

    #[test]
    fn expand_examples() {
        let g = g0();
        let s = state(&g, &["x1", "z1"], "Z", "Y");
        let t = expand(&g, &s, &label_set(["Z"])).unwrap();
        assert_eq!(t.filter.members, id_set(["x1"]));
        let t = expand(&g, &s, &label_set(["X"])).unwrap();
        assert_eq!(t.filter.members, id_set(["z1"]));
        assert_eq!(t.l_c, label_set(["X"]));
        let s = state(&g, &["x1"], "Z", "Y");
        let t = expand(&g, &s, &label_set(["Z"])).unwrap();
        assert_eq!(t.filter, s.filter);
        assert_eq!(expand(&g, &s, &label_set(["Y"])).unwrap_err().code(), "disjointness_violation");
    }

    #[test]
    fn navigate_examples() {
        let g = g0();
        let s = state(&g, &["x1"], "X", "Y");
        let t = navigate(&g, &s, &label_set(["Z"]), &label_set(["Y"])).unwrap();
        assert_eq!(t, state(&g, &["x1"], "Z", "Y"));
        assert_eq!(navigate(&g, &s, &s.l_c, &s.l_b).unwrap(), s);
        assert!(navigate(&g, &s, &label_set(["Y"]), &label_set(["Y"])).is_err());
    }

    #[test]
    fn state_counts() {
        assert_eq!(nav_state_count(7, 3), BigUint::from(1536u32));
        assert_eq!(nav_state_count(2, 2), BigUint::from(8u32));
        for n in 0..5 {
            assert_eq!(nav_state_count(n, 1), BigUint::from(0u32));
        }
        assert_eq!(enumerate_nav_states(&g0()).unwrap().len(), 1536);
    }

    #[test]
    fn enumeration_edge_cases() {
        let (g, _) = crate::ingest_graph([("a", "A")], Vec::<(&str, &str)>::new()).unwrap();
        assert!(enumerate_nav_states(&g).unwrap().is_empty());

        let mut b = crate::GraphBuilder::new();
        b.add_node("a", "A").unwrap();
        b.add_label("B");
        let (g, _) = b.build();
        assert_eq!(enumerate_nav_states(&g).unwrap().len(), 4);

        let mut b = crate::GraphBuilder::new();
        for i in 0..13 {
            b.add_node(format!("v{i}"), "A").unwrap();
        }
        assert!(matches!(enumerate_nav_states(&b.build().0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn step_conditions() {
        let g = g0();
        let a = state(&g, &["x1"], "Z", "Y");
        let b = state(&g, &["x1", "z1"], "Z", "Y");
        let mut ng = NavGraph::new(a.clone());
        ng.record_step(&g, &a, &b, OpKind::Selection).unwrap();
        ng.record_step(&g, &b, &a, OpKind::Expansion).unwrap();
        assert_eq!(ng.steps().len(), 2);
        assert_eq!(ng.states().len(), 2);
        assert_eq!(ng.current(), &a);

        let mut ng = NavGraph::new(state(&g, &["x1"], "X", "Y"));
        let from = ng.entry().clone();
        let err = ng.record_step(&g, &from, &b, OpKind::Navigation).unwrap_err();
        assert_eq!(err.code(), "illegal_step");
        // σ may not touch filter members outside L_C
        let c = state(&g, &["x2", "z1"], "Z", "Y");
        let mut ng = NavGraph::new(a.clone());
        assert!(ng.record_step(&g, &a, &c, OpKind::Selection).is_err());
    }

    #[test]
    fn export_round_trip_and_walk() {
        let g = g0();
        let a = state(&g, &["x1"], "X", "Y");
        let b = state(&g, &["x1"], "Z", "Y");
        let c = state(&g, &["x1", "z1"], "Z", "Y");
        let mut ng = NavGraph::new(a.clone());
        ng.record_step(&g, &a, &b, OpKind::Navigation).unwrap();
        ng.record_step(&g, &b, &c, OpKind::Selection).unwrap();
        ng.record_step(&g, &c, &b, OpKind::Expansion).unwrap();
        let text = ng.export();
        assert_eq!(text.lines().filter(|l| l.split(' ').count() == 3).count(), 3);
        let parsed = NavGraph::parse(&text).unwrap();
        assert_eq!(parsed, ng);
        let walk: Vec<String> = ng.walk().unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(
            walk.join(", "),
            "({x1}, {X}, {Y}), eta, ({x1}, {Z}, {Y}), sigma, ({x1,z1}, {Z}, {Y}), xi, ({x1}, {Z}, {Y})"
        );
    }

    #[test]
    fn tampered_export_rejected() {
        let g = g0();
        let ng = NavGraph::new(state(&g, &["x1"], "X", "Y"));
        let text = ng.export().replace("F=x1", "F=x2");
        assert!(NavGraph::parse(&text).unwrap_err().is_parse());
    }
}
