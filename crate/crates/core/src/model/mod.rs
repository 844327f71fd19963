//! Performance-influence models.
//!
//! A model is a base time plus coefficients on terms; a term is a set of
//! factors "option is set to this non-base value", and it is active in a
//! configuration when every factor matches. Models exist for the whole
//! program (global) and per function (local), always relative to a base
//! configuration.

mod fit;
mod lattice;
mod report;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, Configuration};
use crate::lang::{OptionDecl, Value};
use crate::seconds::Seconds;

pub use fit::{
    fit_campaign, fit_exact, fit_local_models, fit_sampled, rebase, CampaignModels, FitSettings,
};
pub use report::{
    diff_influence, option_hotspots, ChangedOption, FunctionHotspot, Influence,
    InfluencingOptionsReport, OptionHotspotsReport, TermContribution,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("configuration space has {actual} configurations, limit is {limit}")]
    SpaceTooLarge { actual: u128, limit: u128 },
    #[error("measurements miss {missing} configuration(s) of the full factorial")]
    IncompleteFactorial { missing: usize },
    #[error("configuration {0} measured more than once")]
    DuplicateConfig(Configuration),
    #[error("design is degenerate: fewer than two distinct configurations")]
    DegenerateDesign,
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("option `{0}` is not assigned")]
    MissingOption(String),
    #[error("inconsistent models: {0}")]
    InconsistentModels(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// "`option` is set to `value`", where `value` differs from the base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub option: String,
    pub value: Value,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Bool(true) => write!(f, "{}", self.option),
            Value::Bool(false) => write!(f, "!{}", self.option),
            v => write!(f, "{}={}", self.option, v),
        }
    }
}

/// A conjunction of factors over distinct options; the empty term is the base.
///
/// Ordered by degree, then lexicographically by factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term(Vec<Factor>);

impl Term {
    pub fn base() -> Self {
        Term(Vec::new())
    }

    /// Builds a term; returns `None` if two factors name the same option.
    pub fn new(mut factors: Vec<Factor>) -> Option<Self> {
        factors.sort();
        if factors.windows(2).any(|w| w[0].option == w[1].option) {
            return None;
        }
        Some(Term(factors))
    }

    pub(crate) fn from_sorted(factors: Vec<Factor>) -> Self {
        Term(factors)
    }

    /// Shorthand for boolean terms: every named option set to `true`.
    pub fn of_bools(options: &[&str]) -> Self {
        Term::new(
            options
                .iter()
                .map(|o| Factor {
                    option: o.to_string(),
                    value: Value::Bool(true),
                })
                .collect(),
        )
        .expect("distinct options")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_base(&self) -> bool {
        self.0.is_empty()
    }

    pub fn options(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|f| f.option.as_str())
    }

    pub fn is_active(&self, config: &Configuration) -> bool {
        self.0
            .iter()
            .all(|f| config.get(&f.option) == Some(&f.value))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, factor) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(&str, &Value)> = self.0.iter().map(|f| (f.option.as_str(), &f.value)).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(String, Value)> = Vec::deserialize(d)?;
        Term::new(
            pairs
                .into_iter()
                .map(|(option, value)| Factor { option, value })
                .collect(),
        )
        .ok_or_else(|| serde::de::Error::custom("term repeats an option"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Global,
    Local(String),
}

/// Prediction error of an approximate model on one training configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub config: Configuration,
    pub residual: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerformanceInfluenceModel {
    pub base_config: Configuration,
    pub granularity: Granularity,
    /// True when fitted by regression rather than exact inversion.
    pub approximate: bool,
    #[serde(with = "term_list")]
    pub terms: BTreeMap<Term, Seconds>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<Residual>,
}

impl PerformanceInfluenceModel {
    /// A model whose only term is the base. A zero base is not stored.
    pub fn constant(base_config: Configuration, granularity: Granularity, base: Seconds) -> Self {
        let mut terms = BTreeMap::new();
        if !base.is_zero() {
            terms.insert(Term::base(), base);
        }
        PerformanceInfluenceModel {
            base_config,
            granularity,
            approximate: false,
            terms,
            residuals: Vec::new(),
        }
    }

    pub fn base(&self) -> Seconds {
        self.coefficient(&Term::base())
    }

    pub fn coefficient(&self, term: &Term) -> Seconds {
        self.terms.get(term).copied().unwrap_or(Seconds::ZERO)
    }

    /// Non-base terms with their coefficients.
    pub fn influences(&self) -> impl Iterator<Item = (&Term, Seconds)> {
        self.terms
            .iter()
            .filter(|(t, _)| !t.is_base())
            .map(|(t, c)| (t, *c))
    }

    pub fn option_names(&self) -> impl Iterator<Item = &str> {
        self.base_config.option_names()
    }

    /// Requires `config` to assign exactly the model's options.
    pub fn check_config(&self, config: &Configuration) -> Result<(), ModelError> {
        if let Some(extra) = config
            .option_names()
            .find(|o| self.base_config.get(o).is_none())
        {
            return Err(ModelError::UnknownOption(extra.to_string()));
        }
        if let Some(missing) = self.option_names().find(|o| config.get(o).is_none()) {
            return Err(ModelError::MissingOption(missing.to_string()));
        }
        Ok(())
    }

    pub fn predict(&self, config: &Configuration) -> Result<Seconds, ModelError> {
        predict(self, config)
    }
}

/// Base coefficient plus the coefficients of every term active in `config`.
pub fn predict(model: &PerformanceInfluenceModel, config: &Configuration) -> Result<Seconds, ModelError> {
    model.check_config(config)?;
    Ok(model
        .terms
        .iter()
        .filter(|(t, _)| t.is_active(config))
        .map(|(_, c)| *c)
        .sum())
}

impl fmt::Display for PerformanceInfluenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base())?;
        // Largest influences first, as a reader would scan them.
        let mut terms: Vec<(&Term, Seconds)> = self.influences().collect();
        terms.sort_by(|a, b| b.1.abs().cmp(&a.1.abs()).then_with(|| a.0.cmp(b.0)));
        for (t, c) in terms {
            let sign = if c.nanos() < 0 { '-' } else { '+' };
            write!(f, " {sign} {}·{t}", c.abs())?;
        }
        Ok(())
    }
}

/// All configurations of the full factorial, options in name order with the
/// last option varying fastest; the first configuration assigns every
/// option its default.
pub fn enumerate_configs(options: &[OptionDecl], limit: usize) -> Result<Vec<Configuration>, ModelError> {
    let actual = lattice::space_size(options);
    if actual > limit as u128 {
        return Err(ModelError::SpaceTooLarge {
            actual,
            limit: limit as u128,
        });
    }
    let lat = lattice::Lattice::new(options, &Configuration::defaults(options))?;
    Ok((0..lat.size()).map(|c| lat.config(c)).collect())
}

/// Number of configurations in the full factorial (saturating).
pub fn space_size(options: &[OptionDecl]) -> u128 {
    lattice::space_size(options)
}

mod term_list {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        factors: Term,
        coefficient: Seconds,
    }

    pub fn serialize<S: serde::Serializer>(
        terms: &BTreeMap<Term, Seconds>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = terms
            .iter()
            .map(|(t, c)| Entry {
                factors: t.clone(),
                coefficient: *c,
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Term, Seconds>, D::Error> {
        let entries: Vec<Entry> = Vec::deserialize(d)?;
        Ok(entries.into_iter().map(|e| (e.factors, e.coefficient)).collect())
    }
}
