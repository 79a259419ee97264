//! Breadth-first closure of the transition relation, quotiented by
//! identifier renaming.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use super::lts::Direction;
use super::normal::State;
use super::RccsError;
use crate::syntax::{Ccs, Label};

pub const DEFAULT_STATE_CAP: usize = 100_000;

/// An edge between canonical states. `id` is the identifier as it appears
/// in the transition out of `states[src]`; `rename` maps the identifiers of
/// the raw target onto those of `states[dst]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub direction: Direction,
    pub id: u32,
    pub label: Label,
    pub rename: BTreeMap<u32, u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LtsGraph {
    pub root: usize,
    pub states: Vec<State>,
    pub edges: Vec<Edge>,
}

pub fn explore(p: &Ccs) -> Result<LtsGraph, RccsError> {
    explore_with_cap(p, DEFAULT_STATE_CAP)
}

pub fn explore_with_cap(p: &Ccs, cap: usize) -> Result<LtsGraph, RccsError> {
    explore_from(&State::initial(p), cap)
}

/// Explores everything reachable from `start` in both directions.
pub fn explore_from(start: &State, cap: usize) -> Result<LtsGraph, RccsError> {
    let (root, _) = start.canonical_ids();
    let mut index: HashMap<State, usize> = HashMap::new();
    index.insert(root.clone(), 0);
    let mut states = vec![root];
    let mut edges = BTreeSet::new();
    let mut next = 0;
    while next < states.len() {
        let src = states[next].clone();
        for t in src.transitions() {
            let (key, rename) = t.target.canonical_ids();
            let dst = match index.get(&key) {
                Some(&d) => d,
                None => {
                    if states.len() >= cap {
                        return Err(RccsError::StateCap(cap));
                    }
                    index.insert(key.clone(), states.len());
                    states.push(key);
                    states.len() - 1
                }
            };
            edges.insert(Edge { src: next, dst, direction: t.direction, id: t.id, label: t.label, rename });
        }
        next += 1;
    }
    Ok(LtsGraph { root: 0, states, edges: edges.into_iter().collect() })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl LtsGraph {
    /// Outgoing edge indices per state.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.states.len()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.src].push(k);
        }
        adj
    }

    pub fn forward_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.direction == Direction::Forward).count()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (k, s) in self.states.iter().enumerate() {
            let extra = if k == self.root { ", penwidth=2" } else { "" };
            let _ = writeln!(out, "  s{k} [label=\"{}\"{extra}];", dot_escape(&s.to_string()));
        }
        for e in &self.edges {
            let style = match e.direction {
                Direction::Forward => "solid",
                Direction::Backward => "dashed",
            };
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}:{}\", style={style}];",
                e.src,
                e.dst,
                e.id,
                dot_escape(&e.label.to_string())
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }
}
