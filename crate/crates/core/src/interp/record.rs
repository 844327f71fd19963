use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::lang::NodeId;
use crate::seconds::Seconds;

/// Cost accounting of one function in one run, in abstract cost units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodTime {
    #[serde(rename = "self")]
    pub self_cost: u64,
    #[serde(rename = "total")]
    pub total_cost: u64,
}

/// Call tree node. Calls with the same callee under the same stack are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallTree {
    pub function: String,
    #[serde(rename = "self")]
    pub self_cost: u64,
    #[serde(rename = "total")]
    pub total_cost: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CallTree>,
}

impl CallTree {
    /// Visits every node together with the stack of functions leading to it
    /// (root first, the node's own function last).
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a CallTree, &[&'a str])) {
        let mut stack = Vec::new();
        self.visit_inner(&mut stack, f);
    }

    fn visit_inner<'a>(
        &'a self,
        stack: &mut Vec<&'a str>,
        f: &mut impl FnMut(&'a CallTree, &[&'a str]),
    ) {
        stack.push(&self.function);
        f(self, stack);
        stacker::maybe_grow(32 * 1024, 1024 * 1024, || {
            for c in &self.children {
                c.visit_inner(stack, f);
            }
        });
        stack.pop();
    }

    pub fn self_sum(&self) -> u64 {
        let mut sum = 0;
        self.visit(&mut |n, _| sum += n.self_cost);
        sum
    }
}

impl Drop for CallTree {
    // Deeply recursive programs produce deep trees; drop them iteratively.
    fn drop(&mut self) {
        let mut pending = std::mem::take(&mut self.children);
        while let Some(mut node) = pending.pop() {
            pending.append(&mut node.children);
        }
    }
}

/// Deterministic profile of one execution.
///
/// Field order is the serialization order of the campaign store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub config: Configuration,
    pub total_cost: u64,
    pub method_times: BTreeMap<String, MethodTime>,
    pub call_tree: CallTree,
    pub coverage: BTreeSet<NodeId>,
    /// Measured interpreter time; only present in wall-clock mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ns: Option<u64>,
}

impl ExecutionRecord {
    pub fn total_time(&self) -> Seconds {
        Seconds::from_units(self.total_cost)
    }

    pub fn self_time(&self, function: &str) -> Seconds {
        self.method_times
            .get(function)
            .map_or(Seconds::ZERO, |m| Seconds::from_units(m.self_cost))
    }
}

/// Per-function self and outermost-total costs of a call tree. A recursive
/// call nested inside another activation of the same function does not add
/// to its total again.
pub(crate) fn method_times(tree: &CallTree) -> BTreeMap<String, MethodTime> {
    let mut out: BTreeMap<String, MethodTime> = BTreeMap::new();
    tree.visit(&mut |node, stack| {
        let entry = out.entry(node.function.clone()).or_default();
        entry.self_cost += node.self_cost;
        let outermost = !stack[..stack.len() - 1].contains(&node.function.as_str());
        if outermost {
            entry.total_cost += node.total_cost;
        }
    });
    out
}
