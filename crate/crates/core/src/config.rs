use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{Domain, OptionDecl, Value};

/// Assignment of values to a program's options.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(BTreeMap<String, Value>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("option `{0}` is not assigned")]
    Missing(String),
    #[error("unknown option `{0}`")]
    Unknown(String),
    #[error("value `{value}` is outside the domain of option `{option}`")]
    OutOfDomain { option: String, value: Value },
    #[error("malformed assignment `{0}`, expected NAME=VALUE")]
    Malformed(String),
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// All options at their declared defaults.
    pub fn defaults(options: &[OptionDecl]) -> Self {
        options
            .iter()
            .map(|o| (o.name.clone(), o.default.clone()))
            .collect()
    }

    pub fn with(mut self, option: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(option.into(), value.into());
        self
    }

    pub fn set(&mut self, option: impl Into<String>, value: impl Into<Value>) {
        self.0.insert(option.into(), value.into());
    }

    pub fn get(&self, option: &str) -> Option<&Value> {
        self.0.get(option)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn option_names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks that exactly the declared options are assigned, each within its domain.
    pub fn validate(&self, options: &[OptionDecl]) -> Result<(), ConfigError> {
        for o in options {
            match self.0.get(&o.name) {
                None => return Err(ConfigError::Missing(o.name.clone())),
                Some(v) if !o.domain.contains(v) => {
                    return Err(ConfigError::OutOfDomain {
                        option: o.name.clone(),
                        value: v.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = self.0.keys().find(|k| !options.iter().any(|o| &o.name == *k)) {
            return Err(ConfigError::Unknown(extra.clone()));
        }
        Ok(())
    }

    /// Defaults overridden by a list such as `"Duplicates=true, Format=jpg"`.
    /// A bare boolean option name means `NAME=true`.
    pub fn from_assignments(options: &[OptionDecl], text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::defaults(options);
        for item in text.split([',', ' ']).filter(|s| !s.is_empty()) {
            let (name, raw) = match item.split_once('=') {
                Some((n, v)) => (n.trim(), Some(v.trim())),
                None => (item, None),
            };
            let decl = options
                .iter()
                .find(|o| o.name == name)
                .ok_or_else(|| ConfigError::Unknown(name.to_string()))?;
            let value = match (&decl.domain, raw) {
                (Domain::Bool, None | Some("true")) => Value::Bool(true),
                (Domain::Bool, Some("false")) => Value::Bool(false),
                (_, Some(v)) if !v.is_empty() => Value::Sym(v.to_string()),
                _ => return Err(ConfigError::Malformed(item.to_string())),
            };
            if !decl.domain.contains(&value) {
                return Err(ConfigError::OutOfDomain {
                    option: name.to_string(),
                    value,
                });
            }
            config.set(name, value);
        }
        Ok(config)
    }

    /// Options whose values differ, as `(option, self value, other value)`.
    pub fn changes_to<'a>(&'a self, other: &'a Configuration) -> Vec<(&'a str, &'a Value, &'a Value)> {
        self.0
            .iter()
            .filter_map(|(k, v)| match other.0.get(k) {
                Some(w) if w != v => Some((k.as_str(), v, w)),
                _ => None,
            })
            .collect()
    }
}

impl FromIterator<(String, Value)> for Configuration {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Configuration(iter.into_iter().collect())
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Sym(s.to_string())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, "}}")
    }
}
