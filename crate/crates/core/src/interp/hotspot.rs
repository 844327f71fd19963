use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::record::ExecutionRecord;
use crate::seconds::Seconds;

/// Inverse call tree: functions ranked by total time cumulated over all of
/// their call stacks, each with the back traces showing how it was called.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotspotView {
    pub entries: Vec<HotspotEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotspotEntry {
    pub function: String,
    pub total: Seconds,
    #[serde(rename = "self")]
    pub self_time: Seconds,
    pub back_traces: Vec<BackTrace>,
}

/// A call stack from the function up to the entry, with the time spent in
/// the function under that stack.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BackTrace {
    pub stack: Vec<String>,
    pub time: Seconds,
}

impl HotspotView {
    pub fn entry(&self, function: &str) -> Option<&HotspotEntry> {
        self.entries.iter().find(|e| e.function == function)
    }

    pub fn self_sum(&self) -> Seconds {
        self.entries.iter().map(|e| e.self_time).sum()
    }
}

pub fn hotspot_view(record: &ExecutionRecord) -> HotspotView {
    let mut acc: BTreeMap<&str, (u64, u64, Vec<BackTrace>)> = BTreeMap::new();
    record.call_tree.visit(&mut |node, stack| {
        let e = acc.entry(node.function.as_str()).or_default();
        e.1 += node.self_cost;
        // Recursive activations are already contained in the outermost one.
        if stack[..stack.len() - 1].contains(&node.function.as_str()) {
            return;
        }
        e.0 += node.total_cost;
        if node.total_cost > 0 {
            e.2.push(BackTrace {
                stack: stack.iter().rev().map(|s| s.to_string()).collect(),
                time: Seconds::from_units(node.total_cost),
            });
        }
    });
    let mut entries: Vec<HotspotEntry> = acc
        .into_iter()
        .filter(|(_, (total, _, _))| *total > 0)
        .map(|(f, (total, self_cost, mut traces))| {
            traces.sort_by(|a, b| b.time.cmp(&a.time).then_with(|| a.stack.cmp(&b.stack)));
            HotspotEntry {
                function: f.to_string(),
                total: Seconds::from_units(total),
                self_time: Seconds::from_units(self_cost),
                back_traces: traces,
            }
        })
        .collect();
    entries.sort_by(|a, b| b.total.cmp(&a.total).then_with(|| a.function.cmp(&b.function)));
    HotspotView { entries }
}
