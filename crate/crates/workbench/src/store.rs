//! On-disk workspace: program, named configurations, measurements, models
//! and reports.
//!
//! ```text
//! <root>/workspace.json        manifest
//! <root>/<program>.mcf         program source
//! <root>/measurements.jsonl    header line, then one execution record per line
//! <root>/models.json           global and local models
//! <root>/reports/<kind>_<from>_<to>.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use perfchain::config::Configuration;
use perfchain::interp::ExecutionRecord;
use perfchain::lang::{parse_named, Program};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::WorkbenchError;

pub const SCHEMA_VERSION: u32 = 1;

const MANIFEST: &str = "workspace.json";
const MEASUREMENTS: &str = "measurements.jsonl";
const MODELS: &str = "models.json";
const REPORTS: &str = "reports";

/// Stack reserved for (de)serializing one record; call trees of deeply
/// recursive programs nest thousands of levels.
const RECORD_STACK: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// Program file name, relative to the workspace root.
    pub program: String,
    /// Name of the configuration models are expressed against.
    pub base: String,
    pub configs: BTreeMap<String, Configuration>,
}

/// Header line of the measurement store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreHeader {
    pub schema_version: u32,
    pub program_hash: String,
}

/// A report or model file: schema version plus the payload's own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Versioned {
            schema_version: SCHEMA_VERSION,
            body,
        }
    }
}

/// Canonical JSON text shared by report files, `--format json` and the HTTP API.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn content_hash(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WorkbenchError + '_ {
    move |source| WorkbenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> WorkbenchError + '_ {
    move |source| WorkbenchError::Json {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
    pub manifest: Manifest,
    pub source: String,
    pub program: Program,
    pub program_hash: String,
}

impl Workspace {
    /// Creates a workspace, copying the program source into it.
    pub fn init(
        root: &Path,
        program_name: &str,
        source: &str,
        base: &str,
        configs: BTreeMap<String, Configuration>,
    ) -> Result<Self, WorkbenchError> {
        let program = parse_named(program_name, source)?;
        for c in configs.values() {
            c.validate(&program.options)?;
        }
        if !configs.contains_key(base) {
            return Err(WorkbenchError::UnknownConfig(base.to_string()));
        }
        fs::create_dir_all(root).map_err(io_err(root))?;
        let src_path = root.join(program_name);
        fs::write(&src_path, source).map_err(io_err(&src_path))?;
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            program: program_name.to_string(),
            base: base.to_string(),
            configs,
        };
        let path = root.join(MANIFEST);
        fs::write(&path, to_json(&manifest)).map_err(io_err(&path))?;
        Ok(Workspace {
            root: root.to_path_buf(),
            manifest,
            program_hash: content_hash(source),
            source: source.to_string(),
            program,
        })
    }

    pub fn open(root: &Path) -> Result<Self, WorkbenchError> {
        let path = root.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(json_err(&path))?;
        check_version(&path, manifest.schema_version)?;
        let src_path = root.join(&manifest.program);
        let source = fs::read_to_string(&src_path).map_err(io_err(&src_path))?;
        let program = parse_named(&manifest.program, &source)?;
        for c in manifest.configs.values() {
            c.validate(&program.options)?;
        }
        Ok(Workspace {
            root: root.to_path_buf(),
            program_hash: content_hash(&source),
            manifest,
            source,
            program,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn config(&self, name: &str) -> Result<&Configuration, WorkbenchError> {
        self.manifest
            .configs
            .get(name)
            .ok_or_else(|| WorkbenchError::UnknownConfig(name.to_string()))
    }

    fn check_hash(&self, path: &Path, found: &str) -> Result<(), WorkbenchError> {
        if found != self.program_hash {
            return Err(WorkbenchError::Stale {
                path: path.to_path_buf(),
            });
        }
        Ok(())
    }

    pub fn has_records(&self) -> bool {
        self.root.join(MEASUREMENTS).exists()
    }

    pub fn load_records(&self) -> Result<Vec<ExecutionRecord>, WorkbenchError> {
        let path = self.root.join(MEASUREMENTS);
        if !path.exists() {
            return Err(WorkbenchError::Missing {
                what: "measurements".into(),
                hint: "run measure first".into(),
            });
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut lines = text.lines();
        let header: StoreHeader =
            serde_json::from_str(lines.next().unwrap_or_default()).map_err(json_err(&path))?;
        check_version(&path, header.schema_version)?;
        self.check_hash(&path, &header.program_hash)?;
        lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                stacker::grow(RECORD_STACK, || {
                    let mut de = serde_json::Deserializer::from_str(l);
                    de.disable_recursion_limit();
                    ExecutionRecord::deserialize(&mut de)
                })
                .map_err(json_err(&path))
            })
            .collect()
    }

    /// Rewrites the measurement store with `records`.
    pub fn save_records(&self, records: &[ExecutionRecord]) -> Result<(), WorkbenchError> {
        let path = self.root.join(MEASUREMENTS);
        let header = StoreHeader {
            schema_version: SCHEMA_VERSION,
            program_hash: self.program_hash.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for r in records {
            let line = stacker::grow(RECORD_STACK, || serde_json::to_string(r)).map_err(json_err(&path))?;
            out.push_str(&line);
            out.push('\n');
        }
        fs::write(&path, out).map_err(io_err(&path))
    }

    pub fn has_models(&self) -> bool {
        self.root.join(MODELS).exists()
    }

    pub fn load_models<T: DeserializeOwned + HasProgramHash>(&self) -> Result<T, WorkbenchError> {
        let path = self.root.join(MODELS);
        if !path.exists() {
            return Err(WorkbenchError::Missing {
                what: "models".into(),
                hint: "run model first".into(),
            });
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let v: Versioned<T> = serde_json::from_str(&text).map_err(json_err(&path))?;
        check_version(&path, v.schema_version)?;
        self.check_hash(&path, v.body.program_hash())?;
        Ok(v.body)
    }

    pub fn save_models<T: Serialize>(&self, models: &T) -> Result<String, WorkbenchError> {
        let path = self.root.join(MODELS);
        let text = to_json(&Versioned::new(models));
        fs::write(&path, &text).map_err(io_err(&path))?;
        Ok(text)
    }

    pub fn report_path(&self, kind: &str, from: &str, to: &str) -> PathBuf {
        self.root.join(REPORTS).join(format!("{kind}_{from}_{to}.json"))
    }

    /// Writes a report and returns the exact text written.
    pub fn write_report<T: Serialize>(&self, kind: &str, from: &str, to: &str, report: &T) -> Result<String, WorkbenchError> {
        let dir = self.root.join(REPORTS);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = self.report_path(kind, from, to);
        let text = to_json(&Versioned::new(report));
        fs::write(&path, &text).map_err(io_err(&path))?;
        Ok(text)
    }

    /// Reads a report if it exists.
    pub fn read_report<T: DeserializeOwned>(&self, kind: &str, from: &str, to: &str) -> Result<Option<T>, WorkbenchError> {
        let path = self.report_path(kind, from, to);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let v: Versioned<T> = serde_json::from_str(&text).map_err(json_err(&path))?;
        check_version(&path, v.schema_version)?;
        Ok(Some(v.body))
    }

    /// Every report file currently in the workspace, by file name.
    pub fn report_files(&self) -> Result<Vec<PathBuf>, WorkbenchError> {
        let dir = self.root.join(REPORTS);
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut out: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Stores that must belong to the current program version.
pub trait HasProgramHash {
    fn program_hash(&self) -> &str;
}

fn check_version(path: &Path, found: u32) -> Result<(), WorkbenchError> {
    if found != SCHEMA_VERSION {
        return Err(WorkbenchError::SchemaVersion {
            path: path.to_path_buf(),
            found,
        });
    }
    Ok(())
}
