//! Brute-force reference implementations for small inputs. They share no
//! code with the optimized paths beyond pattern generation, so agreement
//! between the two is meaningful.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::{filter_labels, EdgeMode, Filter, Label, LabeledGraph, SchemaGraph, VertexId};
use crate::nav::{enumerate_nav_states, nav_state_count, NavState};
use crate::pattern::{generate_pattern_pairs, GraphPattern};
use crate::view::{gen_view, View, ViewEdge};

/// Binding of every pattern label, keyed by label.
pub type Binding = BTreeMap<Label, VertexId>;

/// All label-preserving homomorphisms of `pattern` into `g` that respect the
/// filter, found by trying every vertex for every pattern label.
pub fn brute_force_matches(g: &LabeledGraph, pattern: &GraphPattern, f: &Filter, mode: EdgeMode) -> BTreeSet<Binding> {
    let labels: Vec<&Label> = pattern.vertices.iter().collect();
    let restricted = filter_labels(g, f);
    let all: Vec<&VertexId> = g.vertices().collect();
    let mut out = BTreeSet::new();
    let mut chosen: Vec<&VertexId> = Vec::with_capacity(labels.len());
    assign(g, pattern, f, mode, &labels, &restricted, &all, &mut chosen, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn assign<'g>(
    g: &'g LabeledGraph,
    pattern: &GraphPattern,
    f: &Filter,
    mode: EdgeMode,
    labels: &[&Label],
    restricted: &BTreeSet<Label>,
    all: &[&'g VertexId],
    chosen: &mut Vec<&'g VertexId>,
    out: &mut BTreeSet<Binding>,
) {
    if chosen.len() == labels.len() {
        let bind: Binding = labels.iter().map(|l| (*l).clone()).zip(chosen.iter().map(|v| (*v).clone())).collect();
        let linked = |a: &VertexId, b: &VertexId| match mode {
            EdgeMode::Directed => g.has_edge(a.as_str(), b.as_str()),
            EdgeMode::Undirected => g.has_edge(a.as_str(), b.as_str()) || g.has_edge(b.as_str(), a.as_str()),
        };
        if pattern.edges.iter().all(|(a, b)| linked(&bind[a], &bind[b])) {
            out.insert(bind);
        }
        return;
    }
    let label = labels[chosen.len()];
    for &v in all {
        if g.label_of(v.as_str()) != Some(label) {
            continue;
        }
        if restricted.contains(label) && !f.contains(v.as_str()) {
            continue;
        }
        chosen.push(v);
        assign(g, pattern, f, mode, labels, restricted, all, chosen, out);
        chosen.pop();
    }
}

/// The view of (F, L_C, L_B) computed directly from its definition over
/// brute-force matches.
pub fn brute_force_view(
    g: &LabeledGraph,
    f: &Filter,
    l_c: &BTreeSet<Label>,
    l_b: &BTreeSet<Label>,
    mode: EdgeMode,
) -> Result<View> {
    if l_c.is_empty() || l_b.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    g.check_labels(l_c.iter().chain(l_b))?;
    if let Some(l) = l_c.intersection(l_b).next() {
        return Err(Error::DisjointnessViolation(l.to_string()));
    }
    let pairs = generate_pattern_pairs(g.schema(), &filter_labels(g, f), l_b, l_c, mode)?;

    let labeled_c = |v: &VertexId| g.label_of(v.as_str()).is_some_and(|l| l_c.contains(l));
    let mut c_q: BTreeSet<VertexId> = f.iter().filter(|v| labeled_c(v)).cloned().collect();
    if c_q.is_empty() {
        c_q = g.vertices().filter(|v| labeled_c(v)).cloned().collect();
    }

    let mut down: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut up: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut b_q = BTreeSet::new();
    for pair in &pairs {
        let mut gather = |p: &GraphPattern, into: &mut BTreeMap<VertexId, BTreeSet<VertexId>>| {
            for m in brute_force_matches(g, p, f, mode) {
                let (c, b) = (m[&pair.to].clone(), m[&pair.from].clone());
                b_q.insert(b.clone());
                into.entry(c).or_default().insert(b);
            }
        };
        gather(&pair.left, &mut down);
        if let Some(right) = &pair.right {
            gather(right, &mut up);
        }
    }
    let get = |m: &BTreeMap<VertexId, BTreeSet<VertexId>>, u: &VertexId| m.get(u).cloned().unwrap_or_default();

    let vertex_support: BTreeMap<VertexId, BTreeSet<VertexId>> = c_q
        .iter()
        .map(|u| (u.clone(), get(&down, u).union(&get(&up, u)).cloned().collect()))
        .collect();

    let mut edge_support = BTreeMap::new();
    for u in &c_q {
        for v in c_q.range(u.clone()..).skip(1) {
            let shared: BTreeSet<VertexId> = match mode {
                EdgeMode::Undirected => vertex_support[u].intersection(&vertex_support[v]).cloned().collect(),
                EdgeMode::Directed => {
                    let uv = get(&down, u).intersection(&get(&up, v)).cloned().collect::<BTreeSet<_>>();
                    let vu = get(&down, v).intersection(&get(&up, u)).cloned().collect::<BTreeSet<_>>();
                    uv.union(&vu).cloned().collect()
                }
            };
            if !shared.is_empty() {
                edge_support.insert(ViewEdge::new(u.clone(), v.clone()), shared);
            }
        }
    }

    Ok(View {
        l_c: l_c.clone(),
        l_b: l_b.clone(),
        filter: f.clone(),
        c_q,
        b_q,
        vertex_support,
        edge_support,
    })
}

/// Constraint on the source-to-sink path that a Steiner tree must contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpineRule {
    /// No path constraint beyond connectivity.
    Free,
    /// A path whose every edge exists in the schema in both directions.
    Reversible,
}

/// Fewest edges of any tree in the (weakly connected) schema that spans
/// `terminals`, found by trying every set of extra labels. With
/// [`SpineRule::Reversible`] the tree must also hold a reversible
/// `source`–`sink` path.
pub fn exact_steiner_edges(
    schema: &SchemaGraph,
    terminals: &BTreeSet<Label>,
    spine: Option<(&Label, &Label)>,
    rule: SpineRule,
) -> Option<usize> {
    let others: Vec<&Label> = schema.labels.iter().filter(|l| !terminals.contains(*l)).collect();
    let mut best: Option<usize> = None;
    for bits in 0u64..1 << others.len() {
        let extra = bits.count_ones() as usize;
        let size = terminals.len() + extra;
        if best.is_some_and(|b| size > b) {
            continue;
        }
        let mut chosen: BTreeSet<&Label> = terminals.iter().collect();
        chosen.extend((0..others.len()).filter(|i| bits >> i & 1 == 1).map(|i| others[i]));
        let weak = |a: &Label, b: &Label| schema.has_edge(a.as_str(), b.as_str()) || schema.has_edge(b.as_str(), a.as_str());
        let both = |a: &Label, b: &Label| schema.has_edge(a.as_str(), b.as_str()) && schema.has_edge(b.as_str(), a.as_str());
        let Some(&first) = chosen.iter().next() else {
            return Some(0);
        };
        if reach(&chosen, first, &weak).len() != chosen.len() {
            continue;
        }
        if let (Some((s, t)), SpineRule::Reversible) = (spine, rule) {
            if !reach(&chosen, s, &both).contains(t) {
                continue;
            }
        }
        best = Some(size - 1);
    }
    best
}

fn reach<'a>(within: &BTreeSet<&'a Label>, start: &'a Label, linked: &dyn Fn(&Label, &Label) -> bool) -> BTreeSet<&'a Label> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        for &b in within {
            if !seen.contains(b) && linked(a, b) {
                seen.insert(b);
                stack.push(b);
            }
        }
    }
    seen
}

/// Distinct states from exhaustive enumeration against the closed-form count.
pub fn nav_count_agrees(g: &LabeledGraph) -> Result<(usize, BigUint)> {
    let states = enumerate_nav_states(g)?;
    let distinct: BTreeSet<&NavState> = states.iter().collect();
    Ok((distinct.len(), nav_state_count(g.vertex_count() as u32, g.label_count() as u32)))
}

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(OracleCheck { name, passed, detail });
    }
}

fn nonempty_subsets(labels: &[Label]) -> Vec<BTreeSet<Label>> {
    (1u32..1 << labels.len())
        .map(|bits| {
            (0..labels.len())
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| labels[i].clone())
                .collect()
        })
        .collect()
}

/// Runs every oracle over a desk-scale graph: the state count, and for each
/// disjoint (L_C, L_B) under the empty filter and each single-vertex filter,
/// view supports against brute force plus pattern shape and size.
pub fn run_oracles(g: &LabeledGraph, mode: EdgeMode) -> Result<OracleReport> {
    let mut report = OracleReport::default();
    let (found, expected) = nav_count_agrees(g)?;
    report.push(
        "nav_state_count".into(),
        BigUint::from(found) == expected,
        format!("enumerated {found}, formula {expected}"),
    );

    let labels = g.labels().to_vec();
    let mut filters = vec![Filter::empty()];
    filters.extend(g.vertices().map(|v| Filter::from_members(BTreeSet::from([v.clone()]))));
    let subsets = nonempty_subsets(&labels);
    for l_c in &subsets {
        for l_b in subsets.iter().filter(|b| b.is_disjoint(l_c)) {
            for f in &filters {
                let name = format!(
                    "view F={:?} L_C={:?} L_B={:?}",
                    f.iter().map(|v| v.as_str()).collect::<Vec<_>>(),
                    l_c.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                    l_b.iter().map(|l| l.as_str()).collect::<Vec<_>>()
                );
                let fast = gen_view(g, f, l_c, l_b, mode);
                let slow = brute_force_view(g, f, l_c, l_b, mode);
                let detail = match (&fast, &slow) {
                    (Ok(_), Ok(_)) => "supports".to_string(),
                    (Err(e), _) | (_, Err(e)) => format!("error {}", e.code()),
                };
                report.push(name.clone(), fast == slow, detail);
                if let Ok(v) = &fast {
                    report.push(format!("{name} invariants"), v.check(g).is_ok(), v.check(g).err().unwrap_or_default());
                }
            }
        }
    }

    let schema = g.schema();
    let lf_choices: Vec<BTreeSet<Label>> = std::iter::once(BTreeSet::new()).chain(nonempty_subsets(&labels)).collect();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            for lf in &lf_choices {
                let (l_b, l_c) = (BTreeSet::from([a.clone()]), BTreeSet::from([b.clone()]));
                let Ok(pairs) = generate_pattern_pairs(schema, lf, &l_b, &l_c, mode) else {
                    continue;
                };
                for pair in pairs {
                    let mut terminals = lf.clone();
                    terminals.extend([pair.from.clone(), pair.to.clone()]);
                    let shape = pair.patterns().all(|p| p.is_tree() && terminals.is_subset(&p.vertices) && p.check(schema, mode).is_ok());
                    let rule = if mode.is_undirected() { SpineRule::Free } else { SpineRule::Reversible };
                    let opt = exact_steiner_edges(schema, &terminals, Some((&pair.to, &pair.from)), rule);
                    let size = pair.left.edge_count();
                    let bounded = opt.is_some_and(|o| size <= 2 * o);
                    report.push(
                        format!("pattern {}->{} L_F={:?}", pair.from, pair.to, lf.iter().map(|l| l.as_str()).collect::<Vec<_>>()),
                        shape && bounded,
                        format!("edges {size}, optimum {opt:?}"),
                    );
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::enumerate_matches;
    use crate::model::{fixtures::g0, label_set};
    use crate::pattern::steiner_tree_pattern;

    #[test]
    fn matches_agree_on_g0() {
        let g = g0();
        let p = steiner_tree_pattern(g.schema(), &label_set(["X", "Z"]), &"X".into(), &"Z".into(), EdgeMode::Undirected).unwrap();
        let fast: BTreeSet<Binding> = enumerate_matches(&g, &p, &Filter::empty(), EdgeMode::Undirected)
            .map(|m| m.bindings.into_iter().collect())
            .collect();
        let slow = brute_force_matches(&g, &p, &Filter::empty(), EdgeMode::Undirected);
        assert_eq!(fast, slow);
        assert_eq!(slow.len(), 4);
    }

    #[test]
    fn steiner_optimum_on_chain() {
        let g = g0();
        assert_eq!(exact_steiner_edges(g.schema(), &label_set(["X", "Z"]), None, SpineRule::Free), Some(2));
        assert_eq!(exact_steiner_edges(g.schema(), &label_set(["X"]), None, SpineRule::Free), Some(0));
        let x = Label::from("X");
        let y = Label::from("Y");
        assert_eq!(exact_steiner_edges(g.schema(), &label_set(["X", "Y"]), Some((&x, &y)), SpineRule::Reversible), None);
    }

    #[test]
    fn g0_report_passes() {
        let g = g0();
        for mode in [EdgeMode::Undirected, EdgeMode::Directed] {
            let r = run_oracles(&g, mode).unwrap();
            let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
            assert!(failed.is_empty(), "{failed:?}");
        }
    }
}
