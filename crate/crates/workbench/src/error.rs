use std::path::PathBuf;

use perfchain::config::ConfigError;
use perfchain::interp::CampaignError;
use perfchain::lang::ParseError;
use perfchain::model::ModelError;
use perfchain::slice::SliceError;

#[derive(Debug, thiserror::Error)]
pub enum WorkbenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: schema version {found} is not supported", path.display())]
    SchemaVersion { path: PathBuf, found: u32 },
    #[error("{}: stale store written for another version of the program; run `measure --fresh`, then `model`", path.display())]
    Stale { path: PathBuf },
    #[error("no {what}: {hint}")]
    Missing { what: String, hint: String },
    #[error("unknown configuration `{0}`")]
    UnknownConfig(String),
    #[error("configuration `{0}` has not been measured; run measure first")]
    NotMeasured(String),
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error(transparent)]
    Slice(#[from] SliceError),
}
