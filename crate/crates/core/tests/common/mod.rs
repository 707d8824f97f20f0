#![allow(dead_code)]

use std::collections::BTreeSet;

use graphview_core::{Filter, GraphBuilder, Label, LabeledGraph, SchemaGraph, VertexId};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn label_name(i: usize) -> String {
    format!("L{i}")
}

/// Random graph with 1..=max_n vertices over 2..=max_m declared labels.
pub fn random_graph(rng: &mut impl Rng, max_n: usize, max_m: usize) -> LabeledGraph {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(2..=max_m);
    let density = rng.random_range(0.05..0.6);
    let mut b = GraphBuilder::new();
    for l in 0..m {
        b.add_label(label_name(l));
    }
    for v in 0..n {
        b.add_node(format!("v{v:02}"), label_name(rng.random_range(0..m))).unwrap();
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(density) {
                b.add_edge(&format!("v{s:02}"), &format!("v{t:02}")).unwrap();
            }
        }
    }
    b.build().0
}

pub fn random_filter(rng: &mut impl Rng, g: &LabeledGraph, p: f64) -> Filter {
    Filter::from_members(g.vertices().filter(|_| rng.random_bool(p)).cloned().collect())
}

/// Random nonempty disjoint (L_C, L_B), L_C of size one when `single_c`.
pub fn random_label_pair(rng: &mut impl Rng, g: &LabeledGraph, single_c: bool) -> (BTreeSet<Label>, BTreeSet<Label>) {
    let mut labels = g.labels().to_vec();
    labels.shuffle(rng);
    let k = labels.len();
    let nc = if single_c { 1 } else { rng.random_range(1..k) };
    let nb = rng.random_range(1..=k - nc);
    let l_c = labels[..nc].iter().cloned().collect();
    let l_b = labels[nc..nc + nb].iter().cloned().collect();
    (l_c, l_b)
}

pub fn random_subset<T: Clone + Ord>(rng: &mut impl Rng, items: &[T], p: f64) -> BTreeSet<T> {
    items.iter().filter(|_| rng.random_bool(p)).cloned().collect()
}

/// Random schema over 2..=max_m labels.
pub fn random_schema(rng: &mut impl Rng, max_m: usize) -> SchemaGraph {
    let m = rng.random_range(2..=max_m);
    let density = rng.random_range(0.1..0.7);
    let labels: Vec<Label> = (0..m).map(|i| Label::from(label_name(i))).collect();
    let mut edges = BTreeSet::new();
    for a in &labels {
        for b in &labels {
            if a != b && rng.random_bool(density) {
                edges.insert((a.clone(), b.clone()));
            }
        }
    }
    SchemaGraph {
        labels: labels.into_iter().collect(),
        edges,
    }
}

pub fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty")
}

/// Fifteen vertices over seven labels; the filter {v4, v6, v7, v13} touches
/// label2, label3 and label5.
pub fn fifteen_vertex_graph() -> LabeledGraph {
    let nodes = [
        ("v1", "label1"),
        ("v2", "label1"),
        ("v3", "label1"),
        ("v4", "label2"),
        ("v5", "label2"),
        ("v6", "label3"),
        ("v7", "label3"),
        ("v8", "label3"),
        ("v9", "label3"),
        ("v10", "label4"),
        ("v11", "label4"),
        ("v12", "label5"),
        ("v13", "label5"),
        ("v14", "label6"),
        ("v15", "label7"),
    ];
    let edges = [
        ("v1", "v6"),
        ("v1", "v7"),
        ("v7", "v2"),
        ("v2", "v8"),
        ("v9", "v3"),
        ("v3", "v8"),
        ("v4", "v6"),
        ("v5", "v9"),
        ("v10", "v4"),
        ("v11", "v5"),
        ("v12", "v10"),
        ("v13", "v11"),
        ("v14", "v1"),
        ("v15", "v14"),
        ("v6", "v12"),
    ];
    graphview_core::ingest_graph(nodes, edges).unwrap().0
}

pub fn ids(items: &[&str]) -> BTreeSet<VertexId> {
    items.iter().map(|s| VertexId::from(*s)).collect()
}
