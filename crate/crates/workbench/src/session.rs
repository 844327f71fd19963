//! Analyses over a loaded workspace. The command line and the HTTP service
//! both go through these functions, so their JSON output is identical.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use perfchain::config::Configuration;
use perfchain::interp::{hotspot_view, ExecutionRecord};
use perfchain::model::{
    diff_influence, option_hotspots, FitSettings, InfluencingOptionsReport, OptionHotspotsReport,
    PerformanceInfluenceModel,
};
use perfchain::profile_diff::{annotate_with_hotspots, diff_hotspot_views, ProfileDiff};
use perfchain::seconds::Seconds;
use perfchain::slice::{build_dependence_graph, cause_effect_chain, ChopResult, DependenceGraph};
use serde::{Deserialize, Serialize};

use crate::error::WorkbenchError;
use crate::store::{HasProgramHash, Workspace};

pub const DEFAULT_MIN_DELTA: Seconds = Seconds::from_nanos(50_000_000);

/// Contents of `models.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredModels {
    pub program_hash: String,
    /// Name of the base configuration.
    pub base: String,
    pub base_config: Configuration,
    pub settings: FitSettings,
    pub global: PerformanceInfluenceModel,
    pub local: BTreeMap<String, PerformanceInfluenceModel>,
}

impl HasProgramHash for StoredModels {
    fn program_hash(&self) -> &str {
        &self.program_hash
    }
}

/// Report kinds and their file-name prefixes.
pub mod kind {
    pub const INFLUENCING_OPTIONS: &str = "influencing-options";
    pub const OPTION_HOTSPOTS: &str = "option-hotspots";
    pub const PROFILE_DIFF: &str = "profile-diff";
    pub const CAUSE_EFFECT: &str = "cause-effect";
}

/// A workspace together with whatever stores it has.
#[derive(Debug)]
pub struct Session {
    pub workspace: Workspace,
    records: Option<Vec<ExecutionRecord>>,
    models: Option<StoredModels>,
    graph: DependenceGraph,
}

impl Session {
    /// Opens the workspace and loads the measurement and model stores that
    /// exist. Stores written for another version of the program are an error.
    pub fn load(root: &Path) -> Result<Self, WorkbenchError> {
        let workspace = Workspace::open(root)?;
        let records = if workspace.has_records() {
            Some(workspace.load_records()?)
        } else {
            None
        };
        let models = if workspace.has_models() {
            Some(workspace.load_models::<StoredModels>()?)
        } else {
            None
        };
        let graph = build_dependence_graph(&workspace.program);
        Ok(Session {
            workspace,
            records,
            models,
            graph,
        })
    }

    pub fn models(&self) -> Result<&StoredModels, WorkbenchError> {
        self.models.as_ref().ok_or_else(|| WorkbenchError::Missing {
            what: "models".into(),
            hint: "run model first".into(),
        })
    }

    pub fn records(&self) -> Result<&[ExecutionRecord], WorkbenchError> {
        self.records.as_deref().ok_or_else(|| WorkbenchError::Missing {
            what: "measurements".into(),
            hint: "run measure first".into(),
        })
    }

    pub fn graph(&self) -> &DependenceGraph {
        &self.graph
    }

    /// The measured record of a named configuration.
    pub fn record(&self, name: &str) -> Result<&ExecutionRecord, WorkbenchError> {
        let config = self.workspace.config(name)?;
        self.records()?
            .iter()
            .find(|r| &r.config == config)
            .ok_or_else(|| WorkbenchError::NotMeasured(name.to_string()))
    }

    pub fn influencing_options(&self, from: &str, to: &str) -> Result<InfluencingOptionsReport, WorkbenchError> {
        let (a, b) = (self.workspace.config(from)?, self.workspace.config(to)?);
        Ok(diff_influence(&self.models()?.global, a, b)?)
    }

    pub fn option_hotspots(&self, from: &str, to: &str, min_delta: Seconds) -> Result<OptionHotspotsReport, WorkbenchError> {
        let (a, b) = (self.workspace.config(from)?, self.workspace.config(to)?);
        Ok(option_hotspots(&self.models()?.local, a, b, min_delta)?)
    }

    /// Profile diff of two measured configurations, marked with the functions
    /// of `hotspots` when given.
    pub fn profile_diff(&self, from: &str, to: &str, hotspots: Option<&OptionHotspotsReport>) -> Result<ProfileDiff, WorkbenchError> {
        let va = hotspot_view(self.record(from)?);
        let vb = hotspot_view(self.record(to)?);
        let diff = diff_hotspot_views(&va, &vb);
        Ok(match hotspots {
            Some(h) => annotate_with_hotspots(diff, h),
            None => diff,
        })
    }

    /// Chop from the reads of `options` to the code of `hotspots` executed
    /// under either configuration.
    pub fn cause_effect(
        &self,
        from: &str,
        to: &str,
        options: &BTreeSet<String>,
        hotspots: &BTreeSet<String>,
    ) -> Result<ChopResult, WorkbenchError> {
        let (ra, rb) = (self.record(from)?, self.record(to)?);
        let coverage: BTreeSet<_> = ra.coverage.union(&rb.coverage).copied().collect();
        Ok(cause_effect_chain(&self.workspace.program, &self.graph, options, hotspots, &coverage)?)
    }

    /// The options and functions a hotspots report points the chain at.
    pub fn chain_inputs(report: &OptionHotspotsReport) -> (BTreeSet<String>, BTreeSet<String>) {
        let options = report.hotspots.iter().flat_map(|h| h.options.iter().cloned()).collect();
        let functions = report.functions().map(str::to_string).collect();
        (options, functions)
    }

    /// The stored hotspots report for a pair, if `hotspots` has been run for it.
    pub fn stored_hotspots(&self, from: &str, to: &str) -> Result<Option<OptionHotspotsReport>, WorkbenchError> {
        self.workspace.read_report(kind::OPTION_HOTSPOTS, from, to)
    }
}
