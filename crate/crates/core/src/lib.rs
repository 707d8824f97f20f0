//! Interactive graph views over directed labeled graphs.
//!
//! A [`LabeledGraph`] is decomposed into weighted views: the vertices of some
//! labels (L_C) linked through shared vertices of other labels (L_B), under a
//! user filter F. Views are built from tree patterns over the label schema.
//! Selection, expansion and navigation operators move between views, and each
//! session's moves are kept as a navigation history that can be exported and
//! replayed.

pub mod document;
pub mod dot;
pub mod error;
pub mod ingest;
pub mod matcher;
pub mod model;
pub mod nav;
pub mod navigator;
pub mod oracle;
pub mod pattern;
pub mod view;

pub use document::{EdgeEntry, VertexEntry, ViewDocument};
pub use dot::to_dot;
pub use error::{Error, Result};
pub use ingest::{parse_graph, write_graph, GraphSummary};
pub use matcher::{enumerate_matches, terminal_path_endpoints, Match};
pub use model::{
    derive_schema, filter_labels, id_set, ingest_graph, label_set, restrict_filter, EdgeMode, Filter,
    GraphBuilder, IngestReport, Label, LabeledGraph, SchemaGraph, VertexId,
};
pub use nav::{
    enumerate_nav_states, expand, nav_state_count, navigate, select, NavGraph, NavState, OpKind,
    Operation,
};
pub use navigator::Navigator;
pub use pattern::{generate_pattern_pairs, is_pair, steiner_tree_pattern, GraphPattern, PatternPair};
pub use view::{gen_view, minimal_view, vis_equivalent, weigh, weigh_with, View, ViewEdge, WeightedView};
