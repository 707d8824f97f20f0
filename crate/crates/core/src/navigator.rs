//! A navigation session over one frozen graph: current state, its view, and
//! the recorded history.

use std::sync::Arc;

use crate::document::ViewDocument;
use crate::error::{Error, Result};
use crate::model::{EdgeMode, LabeledGraph};
use crate::nav::{expand, navigate, select_in_view, selection_between, NavGraph, NavState, OpKind, Operation};
use crate::view::{minimal_view, weigh, View, WeightedView};

#[derive(Debug, Clone)]
pub struct Navigator {
    graph: Arc<LabeledGraph>,
    mode: EdgeMode,
    history: NavGraph,
    view: View,
}

impl Navigator {
    /// Starts at `entry`, whose view must be computable.
    pub fn new(graph: Arc<LabeledGraph>, entry: NavState, mode: EdgeMode) -> Result<Self> {
        entry.validate(&graph)?;
        let view = entry.view(&graph, mode)?;
        Ok(Navigator {
            graph,
            mode,
            history: NavGraph::new(entry),
            view,
        })
    }

    pub fn graph(&self) -> &Arc<LabeledGraph> {
        &self.graph
    }

    pub fn mode(&self) -> EdgeMode {
        self.mode
    }

    pub fn state(&self) -> &NavState {
        self.history.current()
    }

    pub fn history(&self) -> &NavGraph {
        &self.history
    }

    /// The full view of the current state.
    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn weighted_view(&self, full: bool) -> WeightedView {
        if full {
            weigh(self.view.clone())
        } else {
            weigh(minimal_view(&self.view))
        }
    }

    pub fn document(&self, full: bool) -> ViewDocument {
        ViewDocument::new(&self.graph, &self.weighted_view(full))
    }

    /// Applies `op` and records the step. On error nothing changes.
    pub fn apply(&mut self, op: &Operation) -> Result<&NavState> {
        let g = &*self.graph;
        let current = self.history.current().clone();
        let next = match op {
            Operation::Select(ids) => {
                for id in ids {
                    if !g.contains(id.as_str()) {
                        return Err(Error::UnknownVertex(id.to_string()));
                    }
                }
                select_in_view(g, &current, &self.view, ids)?
            }
            Operation::Expand(l_c) => expand(g, &current, l_c)?,
            Operation::Navigate { l_c, l_b } => navigate(g, &current, l_c, l_b)?,
        };
        let view = next.view(g, self.mode)?;
        self.history.record_step(g, &current, &next, op.kind())?;
        self.view = view;
        Ok(self.history.current())
    }

    /// Re-executes an exported history from its entry state. Every step must
    /// leave from the previous step's target and reproduce its recorded target.
    pub fn replay(graph: Arc<LabeledGraph>, export: &str, mode: EdgeMode) -> Result<Self> {
        let recorded = NavGraph::parse(export)?;
        let mut nav = Navigator::new(graph, recorded.entry().clone(), mode)?;
        for step in recorded.steps() {
            let (from, to) = (recorded.state(step.from), recorded.state(step.to));
            let diverged = |reason: &str| Error::IllegalStep {
                op: step.op.symbol(),
                reason: reason.to_string(),
            };
            if from != nav.state() {
                return Err(diverged("step does not leave from the current state"));
            }
            let op = match step.op {
                OpKind::Selection => Operation::Select(
                    selection_between(&nav.graph, from, to).ok_or_else(|| diverged("no selection reaches target"))?,
                ),
                OpKind::Expansion => Operation::Expand(to.l_c.clone()),
                OpKind::Navigation => Operation::Navigate {
                    l_c: to.l_c.clone(),
                    l_b: to.l_b.clone(),
                },
            };
            nav.apply(&op)?;
            if nav.state() != to {
                return Err(diverged("replayed target differs from recorded target"));
            }
        }
        Ok(nav)
    }
}
