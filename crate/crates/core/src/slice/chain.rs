use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{filter_by_coverage, DependenceGraph, Edge, SliceError};
use crate::lang::{option_load_sites, NodeId, NodeKind, NodeTable, Program, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Reads an influencing option.
    Source,
    /// An option hotspot.
    Target,
    Intermediate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodNode {
    pub function: String,
    pub role: Role,
}

/// Dependence between two functions, with the statement-level edges behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodEdge {
    pub from: String,
    pub to: String,
    pub witnesses: Vec<Edge>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodGraph {
    pub nodes: Vec<MethodNode>,
    pub edges: Vec<MethodEdge>,
}

impl MethodGraph {
    pub fn role(&self, function: &str) -> Option<Role> {
        self.nodes.iter().find(|n| n.function == function).map(|n| n.role)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Highlight {
    pub span: Span,
    pub node: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainWarning {
    /// Influencing options that the program never reads.
    NoSources { options: Vec<String> },
    /// No executed dependence path leads from the sources to the targets.
    NoPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChopResult {
    pub chop_id: String,
    pub options: Vec<String>,
    pub hotspot_functions: Vec<String>,
    pub sources: BTreeSet<NodeId>,
    pub targets: BTreeSet<NodeId>,
    pub nodes: BTreeSet<NodeId>,
    pub method_graph: MethodGraph,
    /// Highlighted ranges per source file, ordered by position.
    pub highlights: BTreeMap<String, Vec<Highlight>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<ChainWarning>,
}

/// Chops from where `options` are read to the executed code of `hotspots`,
/// keeping only nodes executed under one of the compared configurations.
pub fn cause_effect_chain(
    program: &Program,
    graph: &DependenceGraph,
    options: &BTreeSet<String>,
    hotspots: &BTreeSet<String>,
    coverage_union: &BTreeSet<NodeId>,
) -> Result<ChopResult, SliceError> {
    let loads = option_load_sites(program);
    let mut warnings = Vec::new();
    let mut sources = BTreeSet::new();
    let mut unread = Vec::new();
    for o in options {
        let sites = loads.get(o).ok_or_else(|| SliceError::UnknownOption(o.clone()))?;
        if sites.is_empty() {
            unread.push(o.clone());
        }
        sources.extend(sites.iter().copied());
    }
    if !unread.is_empty() {
        warnings.push(ChainWarning::NoSources { options: unread });
    }
    if let Some(f) = hotspots.iter().find(|f| program.function(f).is_none()) {
        return Err(SliceError::UnknownFunction(f.clone()));
    }

    let table = NodeTable::new(program);
    let targets: BTreeSet<NodeId> = coverage_union
        .iter()
        .copied()
        .filter(|n| graph.contains(*n))
        .filter(|n| {
            table.get(*n).is_some_and(|info| {
                matches!(info.kind, NodeKind::FunctionEntry | NodeKind::Param | NodeKind::Stmt)
                    && info.function.as_ref().is_some_and(|f| hotspots.contains(f))
            })
        })
        .collect();

    let nodes = filter_by_coverage(&graph.chop(&sources, &targets)?, coverage_union);
    if nodes.is_empty() {
        warnings.push(ChainWarning::NoPath);
    }

    let function_of = |n: &NodeId| table.function_of(*n).expect("graph nodes belong to functions");
    let mut roles: BTreeMap<&str, Role> = BTreeMap::new();
    for n in &nodes {
        let role = if targets.contains(n) {
            Role::Target
        } else if sources.contains(n) {
            Role::Source
        } else {
            Role::Intermediate
        };
        let slot = roles.entry(function_of(n)).or_insert(Role::Intermediate);
        *slot = match (*slot, role) {
            (Role::Target, _) | (_, Role::Target) => Role::Target,
            (Role::Source, _) | (_, Role::Source) => Role::Source,
            _ => Role::Intermediate,
        };
    }
    let mut cross: BTreeMap<(&str, &str), Vec<Edge>> = BTreeMap::new();
    for e in graph.edges() {
        if nodes.contains(&e.from) && nodes.contains(&e.to) {
            let (a, b) = (function_of(&e.from), function_of(&e.to));
            if a != b {
                cross.entry((a, b)).or_default().push(*e);
            }
        }
    }
    let method_graph = MethodGraph {
        nodes: roles
            .iter()
            .map(|(f, r)| MethodNode {
                function: f.to_string(),
                role: *r,
            })
            .collect(),
        edges: cross
            .into_iter()
            .map(|((a, b), witnesses)| MethodEdge {
                from: a.to_string(),
                to: b.to_string(),
                witnesses,
            })
            .collect(),
    };

    let mut spans: Vec<Highlight> = nodes
        .iter()
        .map(|n| Highlight {
            span: table.get(*n).expect("program node").highlight,
            node: *n,
        })
        .collect();
    spans.sort();
    let mut highlights = BTreeMap::new();
    if !spans.is_empty() {
        highlights.insert(program.file.clone(), spans);
    }

    Ok(ChopResult {
        chop_id: chop_id(&program.file, &sources, &targets),
        options: options.iter().cloned().collect(),
        hotspot_functions: hotspots.iter().cloned().collect(),
        sources,
        targets,
        nodes,
        method_graph,
        highlights,
        warnings,
    })
}

fn chop_id(file: &str, sources: &BTreeSet<NodeId>, targets: &BTreeSet<NodeId>) -> String {
    let mut h = Sha256::new();
    h.update(file.as_bytes());
    for (tag, set) in [(b's', sources), (b't', targets)] {
        h.update([tag]);
        for n in set {
            h.update(n.0.to_le_bytes());
        }
    }
    hex::encode(&h.finalize()[..6])
}
