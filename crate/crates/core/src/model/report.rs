use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ModelError, PerformanceInfluenceModel, Term};
use crate::config::Configuration;
use crate::lang::Value;
use crate::seconds::Seconds;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangedOption {
    pub option: String,
    pub from: Value,
    pub to: Value,
}

/// A term whose truth value differs between the two configurations.
/// `contribution` is `+coefficient` if it becomes active, `-coefficient` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermContribution {
    pub term: Term,
    pub coefficient: Seconds,
    pub contribution: Seconds,
}

/// Delta caused by changing a set of options together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Influence {
    pub options: Vec<String>,
    pub delta: Seconds,
    pub terms: Vec<TermContribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluencingOptionsReport {
    pub from_config: Configuration,
    pub to_config: Configuration,
    pub from_time: Seconds,
    pub to_time: Seconds,
    pub approximate: bool,
    pub changed: Vec<ChangedOption>,
    pub influences: Vec<Influence>,
    pub unexplained_changes: Vec<String>,
}

impl InfluencingOptionsReport {
    pub fn total_delta(&self) -> Seconds {
        self.influences.iter().map(|i| i.delta).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionHotspot {
    pub function: String,
    pub delta: Seconds,
    pub from_time: Seconds,
    pub to_time: Seconds,
    /// Changed options involved in the contributing terms.
    pub options: Vec<String>,
    pub terms: Vec<TermContribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionHotspotsReport {
    pub from_config: Configuration,
    pub to_config: Configuration,
    pub changed: Vec<ChangedOption>,
    pub min_delta: Seconds,
    pub hotspots: Vec<FunctionHotspot>,
    /// Functions with a nonzero delta below `min_delta`.
    pub omitted: usize,
    pub omitted_delta: Seconds,
}

impl OptionHotspotsReport {
    pub fn total_delta(&self) -> Seconds {
        self.hotspots.iter().map(|h| h.delta).sum::<Seconds>() + self.omitted_delta
    }

    pub fn functions(&self) -> impl Iterator<Item = &str> {
        self.hotspots.iter().map(|h| h.function.as_str())
    }
}

fn changed_options(from: &Configuration, to: &Configuration) -> Vec<ChangedOption> {
    from.changes_to(to)
        .into_iter()
        .map(|(option, a, b)| ChangedOption {
            option: option.to_string(),
            from: a.clone(),
            to: b.clone(),
        })
        .collect()
}

fn flipped_terms(
    model: &PerformanceInfluenceModel,
    from: &Configuration,
    to: &Configuration,
) -> Vec<TermContribution> {
    model
        .influences()
        .filter_map(|(term, coefficient)| {
            match (term.is_active(from), term.is_active(to)) {
                (false, true) => Some(coefficient),
                (true, false) => Some(-coefficient),
                _ => None,
            }
            .map(|contribution| TermContribution {
                term: term.clone(),
                coefficient,
                contribution,
            })
        })
        .collect()
}

/// Attributes `predict(to) - predict(from)` to groups of changed options.
///
/// Every term whose truth value flips is assigned to the set of changed
/// options it mentions. Groups whose contributions cancel out are dropped;
/// changed options left in no group are reported as unexplained.
pub fn diff_influence(
    model: &PerformanceInfluenceModel,
    from: &Configuration,
    to: &Configuration,
) -> Result<InfluencingOptionsReport, ModelError> {
    let from_time = model.predict(from)?;
    let to_time = model.predict(to)?;
    let changed = changed_options(from, to);
    let changed_names: BTreeSet<&str> = changed.iter().map(|c| c.option.as_str()).collect();

    let mut groups: BTreeMap<Vec<String>, Vec<TermContribution>> = BTreeMap::new();
    for tc in flipped_terms(model, from, to) {
        let key = tc
            .term
            .options()
            .filter(|o| changed_names.contains(o))
            .map(str::to_string)
            .collect();
        groups.entry(key).or_default().push(tc);
    }
    let mut influences: Vec<Influence> = groups
        .into_iter()
        .map(|(options, terms)| Influence {
            delta: terms.iter().map(|t| t.contribution).sum(),
            options,
            terms,
        })
        .filter(|i| !i.delta.is_zero())
        .collect();
    influences.sort_by(|a, b| {
        b.delta
            .abs()
            .cmp(&a.delta.abs())
            .then_with(|| a.options.cmp(&b.options))
    });
    let explained: BTreeSet<&str> = influences
        .iter()
        .flat_map(|i| i.options.iter().map(String::as_str))
        .collect();
    let unexplained_changes = changed_names
        .iter()
        .filter(|o| !explained.contains(*o))
        .map(|o| o.to_string())
        .collect();

    Ok(InfluencingOptionsReport {
        from_config: from.clone(),
        to_config: to.clone(),
        from_time,
        to_time,
        approximate: model.approximate,
        changed,
        influences,
        unexplained_changes,
    })
}

/// Ranks functions by how much their local model changes between two
/// configurations. Functions whose delta is below `min_delta` in magnitude
/// are counted in `omitted`/`omitted_delta` instead of listed.
pub fn option_hotspots(
    local_models: &BTreeMap<String, PerformanceInfluenceModel>,
    from: &Configuration,
    to: &Configuration,
    min_delta: Seconds,
) -> Result<OptionHotspotsReport, ModelError> {
    let mut reference: Option<(&str, &Configuration)> = None;
    for (name, m) in local_models {
        match reference {
            None => reference = Some((name, &m.base_config)),
            Some((first, base)) => {
                let same_space = base.option_names().eq(m.base_config.option_names());
                if !same_space {
                    return Err(ModelError::InconsistentModels(format!(
                        "`{first}` and `{name}` have different option spaces"
                    )));
                }
                if *base != m.base_config {
                    return Err(ModelError::InconsistentModels(format!(
                        "`{first}` and `{name}` have different base configurations"
                    )));
                }
            }
        }
    }

    let changed = changed_options(from, to);
    let changed_names: BTreeSet<&str> = changed.iter().map(|c| c.option.as_str()).collect();
    let mut hotspots = Vec::new();
    let mut omitted = 0;
    let mut omitted_delta = Seconds::ZERO;
    for (function, model) in local_models {
        let from_time = model.predict(from)?;
        let to_time = model.predict(to)?;
        let delta = to_time - from_time;
        if delta.is_zero() {
            continue;
        }
        if delta.abs() < min_delta {
            omitted += 1;
            omitted_delta += delta;
            continue;
        }
        let terms = flipped_terms(model, from, to);
        let options: BTreeSet<&str> = terms
            .iter()
            .flat_map(|t| t.term.options())
            .filter(|o| changed_names.contains(o))
            .collect();
        hotspots.push(FunctionHotspot {
            function: function.clone(),
            delta,
            from_time,
            to_time,
            options: options.into_iter().map(str::to_string).collect(),
            terms,
        });
    }
    hotspots.sort_by(|a, b| {
        b.delta
            .abs()
            .cmp(&a.delta.abs())
            .then_with(|| a.function.cmp(&b.function))
    });
    Ok(OptionHotspotsReport {
        from_config: from.clone(),
        to_config: to.clone(),
        changed,
        min_delta,
        hotspots,
        omitted,
        omitted_delta,
    })
}
