//! Differences between the hotspot views of two runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::interp::{HotspotEntry, HotspotView};
use crate::model::OptionHotspotsReport;
use crate::seconds::Seconds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresenceStatus {
    Both,
    OnlyA,
    OnlyB,
}

/// One call stack (function first, entry last) with its time in each view.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackTime {
    pub stack: Vec<String>,
    pub time_a: Seconds,
    pub time_b: Seconds,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackDiff {
    pub shared: Vec<StackTime>,
    pub only_a: Vec<StackTime>,
    pub only_b: Vec<StackTime>,
}

impl StackDiff {
    pub fn is_unchanged(&self) -> bool {
        self.only_a.is_empty() && self.only_b.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDiffEntry {
    pub function: String,
    /// Total time in view A.
    pub time_a: Seconds,
    pub time_b: Seconds,
    pub self_a: Seconds,
    pub self_b: Seconds,
    /// `time_b - time_a`.
    pub delta: Seconds,
    pub status: PresenceStatus,
    pub stack_diff: StackDiff,
    #[serde(default)]
    pub is_option_hotspot: bool,
}

impl ProfileDiffEntry {
    pub fn self_delta(&self) -> Seconds {
        self.self_b - self.self_a
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDiff {
    pub entries: Vec<ProfileDiffEntry>,
}

/// Rows of a diff that pass a display threshold, plus an aggregate of the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibleRows<'a> {
    pub rows: Vec<&'a ProfileDiffEntry>,
    pub hidden: usize,
    pub hidden_delta: Seconds,
    pub hidden_self_delta: Seconds,
}

/// Default display threshold for profile diffs.
pub const DISPLAY_THRESHOLD: Seconds = Seconds::from_nanos(50_000_000);

impl ProfileDiff {
    pub fn entry(&self, function: &str) -> Option<&ProfileDiffEntry> {
        self.entries.iter().find(|e| e.function == function)
    }

    pub fn self_delta_sum(&self) -> Seconds {
        self.entries.iter().map(ProfileDiffEntry::self_delta).sum()
    }

    /// Entries at or above `threshold` in at least one view. Hidden entries
    /// are summed so the table still accounts for every second.
    pub fn visible(&self, threshold: Seconds) -> VisibleRows<'_> {
        let mut out = VisibleRows {
            rows: Vec::new(),
            hidden: 0,
            hidden_delta: Seconds::ZERO,
            hidden_self_delta: Seconds::ZERO,
        };
        for e in &self.entries {
            if e.time_a >= threshold || e.time_b >= threshold {
                out.rows.push(e);
            } else {
                out.hidden += 1;
                out.hidden_delta += e.delta;
                out.hidden_self_delta += e.self_delta();
            }
        }
        out
    }
}

pub fn diff_hotspot_views(view_a: &HotspotView, view_b: &HotspotView) -> ProfileDiff {
    let a: BTreeMap<&str, &HotspotEntry> = view_a.entries.iter().map(|e| (e.function.as_str(), e)).collect();
    let b: BTreeMap<&str, &HotspotEntry> = view_b.entries.iter().map(|e| (e.function.as_str(), e)).collect();
    let functions: BTreeSet<&str> = a.keys().chain(b.keys()).copied().collect();

    let mut entries: Vec<ProfileDiffEntry> = functions
        .into_iter()
        .map(|f| {
            let ea = a.get(f);
            let eb = b.get(f);
            let status = match (ea, eb) {
                (Some(_), Some(_)) => PresenceStatus::Both,
                (Some(_), None) => PresenceStatus::OnlyA,
                _ => PresenceStatus::OnlyB,
            };
            let time_a = ea.map_or(Seconds::ZERO, |e| e.total);
            let time_b = eb.map_or(Seconds::ZERO, |e| e.total);
            ProfileDiffEntry {
                function: f.to_string(),
                time_a,
                time_b,
                self_a: ea.map_or(Seconds::ZERO, |e| e.self_time),
                self_b: eb.map_or(Seconds::ZERO, |e| e.self_time),
                delta: time_b - time_a,
                status,
                stack_diff: diff_stacks(ea.copied(), eb.copied()),
                is_option_hotspot: false,
            }
        })
        .collect();
    entries.sort_by(|x, y| {
        y.delta
            .abs()
            .cmp(&x.delta.abs())
            .then_with(|| x.function.cmp(&y.function))
    });
    ProfileDiff { entries }
}

fn diff_stacks(a: Option<&HotspotEntry>, b: Option<&HotspotEntry>) -> StackDiff {
    let times = |e: Option<&HotspotEntry>| -> BTreeMap<Vec<String>, Seconds> {
        e.map(|e| e.back_traces.iter().map(|t| (t.stack.clone(), t.time)).collect())
            .unwrap_or_default()
    };
    let ta = times(a);
    let tb = times(b);
    let mut diff = StackDiff::default();
    for stack in ta.keys().chain(tb.keys()).collect::<BTreeSet<_>>() {
        let item = StackTime {
            stack: stack.clone(),
            time_a: ta.get(stack).copied().unwrap_or(Seconds::ZERO),
            time_b: tb.get(stack).copied().unwrap_or(Seconds::ZERO),
        };
        match (ta.contains_key(stack), tb.contains_key(stack)) {
            (true, true) => diff.shared.push(item),
            (true, false) => diff.only_a.push(item),
            _ => diff.only_b.push(item),
        }
    }
    diff
}

/// Flags entries whose function is listed in `report`. Order is kept.
pub fn annotate_with_hotspots(mut diff: ProfileDiff, report: &OptionHotspotsReport) -> ProfileDiff {
    let hot: BTreeSet<&str> = report.functions().collect();
    for e in &mut diff.entries {
        e.is_option_hotspot = hot.contains(e.function.as_str());
    }
    diff
}
