//! Statement-level dependence graphs, slices and chops.

mod build;
mod chain;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lang::NodeId;

pub use build::build_dependence_graph;
pub use chain::{
    cause_effect_chain, ChainWarning, ChopResult, Highlight, MethodEdge, MethodGraph, MethodNode, Role,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("node {0} is not in the dependence graph")]
    UnknownNode(NodeId),
    #[error("control edge {0} -> {0} is a self-loop")]
    ControlSelfLoop(NodeId),
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Data,
    Control,
    Call,
    ParamIn,
    ParamOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub kind: EdgeKind,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
}

/// Directed dependence graph; an edge `from -> to` means `to` depends on `from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct DependenceGraph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
    index: BTreeMap<NodeId, usize>,
    ids: Vec<NodeId>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl TryFrom<GraphRepr> for DependenceGraph {
    type Error = SliceError;
    fn try_from(r: GraphRepr) -> Result<Self, SliceError> {
        DependenceGraph::new(r.nodes, r.edges)
    }
}

impl From<DependenceGraph> for GraphRepr {
    fn from(g: DependenceGraph) -> Self {
        GraphRepr {
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl DependenceGraph {
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, SliceError> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let ids: Vec<NodeId> = nodes.iter().copied().collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ = vec![Vec::new(); ids.len()];
        let mut pred = vec![Vec::new(); ids.len()];
        for e in &edges {
            let from = *index.get(&e.from).ok_or(SliceError::UnknownNode(e.from))?;
            let to = *index.get(&e.to).ok_or(SliceError::UnknownNode(e.to))?;
            if e.kind == EdgeKind::Control && from == to {
                return Err(SliceError::ControlSelfLoop(e.from));
            }
            succ[from].push(to);
            pred[to].push(from);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(DependenceGraph {
            nodes,
            edges,
            index,
            ids,
            succ,
            pred,
        })
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    fn indices(&self, set: &BTreeSet<NodeId>) -> Result<Vec<usize>, SliceError> {
        set.iter()
            .map(|n| self.index.get(n).copied().ok_or(SliceError::UnknownNode(*n)))
            .collect()
    }

    fn mask(&self, set: &BTreeSet<NodeId>) -> Vec<bool> {
        let mut m = vec![false; self.ids.len()];
        for n in set {
            if let Some(&i) = self.index.get(n) {
                m[i] = true;
            }
        }
        m
    }

    /// Nodes reachable from `start` following `adj`, visiting only nodes allowed by `within`.
    fn reach(&self, start: &[usize], adj: &[Vec<usize>], within: &[bool]) -> BTreeSet<NodeId> {
        let mut seen = vec![false; self.ids.len()];
        let mut stack: Vec<usize> = start.iter().copied().filter(|&i| within[i]).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if within[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(i, _)| self.ids[i])
            .collect()
    }

    /// Targets plus every node they transitively depend on.
    pub fn backward_slice(&self, targets: &BTreeSet<NodeId>) -> Result<BTreeSet<NodeId>, SliceError> {
        let start = self.indices(targets)?;
        Ok(self.reach(&start, &self.pred, &vec![true; self.ids.len()]))
    }

    /// Nodes reachable from `sources` without leaving `within`. Sources outside
    /// `within` contribute nothing.
    pub fn forward_slice(
        &self,
        sources: &BTreeSet<NodeId>,
        within: &BTreeSet<NodeId>,
    ) -> Result<BTreeSet<NodeId>, SliceError> {
        let start = self.indices(sources)?;
        Ok(self.reach(&start, &self.succ, &self.mask(within)))
    }

    fn backward_within(&self, targets: &[usize], within: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
        self.reach(targets, &self.pred, &self.mask(within))
    }

    /// Nodes on some path from a source to a target.
    ///
    /// Starts from the backward slice of the targets and alternates forward
    /// and backward restriction until the set no longer shrinks.
    pub fn chop(
        &self,
        sources: &BTreeSet<NodeId>,
        targets: &BTreeSet<NodeId>,
    ) -> Result<BTreeSet<NodeId>, SliceError> {
        let s = self.indices(sources)?;
        let t = self.indices(targets)?;
        let mut current = self.backward_slice(targets)?;
        loop {
            let forward = self.reach(&s, &self.succ, &self.mask(&current));
            let next = self.backward_within(&t, &forward);
            if next == current {
                return Ok(next);
            }
            current = next;
        }
    }
}

/// Chop nodes executed under at least one of the compared configurations.
pub fn filter_by_coverage(nodes: &BTreeSet<NodeId>, coverage_union: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    nodes.intersection(coverage_union).copied().collect()
}
