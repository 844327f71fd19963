//! Command-line front end. Each command returns its output and exit code
//! instead of printing, so it can be driven in-process.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use perfchain::config::Configuration;
use perfchain::fixtures;
use perfchain::interp::measure_campaign;
use perfchain::lang::{Domain, OptionDecl, Value};
use perfchain::model::{enumerate_configs, fit_campaign, FitSettings};
use perfchain::seconds::Seconds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::WorkbenchError;
use crate::render;
use crate::session::{kind, Session, StoredModels, DEFAULT_MIN_DELTA};
use crate::store::{to_json, Versioned, Workspace};

/// Largest full factorial `measure` will run.
pub const FULL_FACTORIAL_LIMIT: usize = 1 << 16;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "perfchain", version, about = "Trace configuration-dependent slowdowns from options to code")]
pub struct Cli {
    /// Workspace directory.
    #[arg(long, global = true, default_value = ".perfchain")]
    pub workspace: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a workspace from a program and named configurations.
    Init(InitArgs),
    /// Run a measurement campaign.
    Measure(MeasureArgs),
    /// Fit global and per-function models from the measurements.
    Model(ModelArgs),
    /// Options whose change explains the time difference of two configurations.
    DiffConfig(PairArgs),
    /// Functions whose time changes between two configurations.
    Hotspots(HotspotArgs),
    /// Compare the profiles of two configurations.
    ProfileDiff(PairArgs),
    /// Code on dependence paths from the influencing options to the hotspots.
    Chain(PairArgs),
    /// Serve the analyses over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InitArgs {
    /// Start from a bundled example program.
    #[arg(long, conflicts_with = "program")]
    pub fixture: Option<String>,
    /// Program source file.
    #[arg(long, required_unless_present = "fixture")]
    pub program: Option<PathBuf>,
    /// Named configuration, NAME=ASSIGNMENTS, e.g. `user=Duplicates,Transactions`.
    #[arg(long = "config", value_name = "NAME=ASSIGNMENTS")]
    pub configs: Vec<String>,
    /// Configuration models are expressed against.
    #[arg(long, default_value = "default")]
    pub base: String,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Measure this many random configurations instead of the full factorial.
    #[arg(long, value_name = "N")]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Discard existing measurements first.
    #[arg(long)]
    pub fresh: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = FitSettings::default().max_degree)]
    pub max_degree: usize,
    /// Named base configuration; defaults to the workspace's.
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Args)]
pub struct HotspotArgs {
    pub from: String,
    pub to: String,
    /// Seconds; smaller changes are summarized.
    #[arg(long, default_value_t = DEFAULT_MIN_DELTA.as_secs_f64())]
    pub min_delta: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 7788)]
    pub port: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK }
    }

    fn report(json: String, text: String, format: Format, empty: bool) -> Self {
        Outcome {
            stdout: match format {
                Format::Json => json,
                Format::Text => text,
            },
            code: if empty { EXIT_EMPTY } else { EXIT_OK },
        }
    }
}

/// Runs every command except `serve`.
pub fn run(cli: &Cli) -> Result<Outcome, WorkbenchError> {
    let root = cli.workspace.as_path();
    match &cli.command {
        Command::Init(a) => init(root, a),
        Command::Measure(a) => measure(root, a),
        Command::Model(a) => model(root, a, cli.format),
        Command::DiffConfig(a) => diff_config(root, &a.from, &a.to, cli.format),
        Command::Hotspots(a) => hotspots(root, a, cli.format),
        Command::ProfileDiff(a) => profile_diff(root, &a.from, &a.to, cli.format),
        Command::Chain(a) => chain(root, &a.from, &a.to, cli.format),
        Command::Serve(_) => Err(WorkbenchError::Usage("serve is handled by the binary".into())),
    }
}

fn parse_named_config(options: &[OptionDecl], arg: &str) -> Result<(String, Configuration), WorkbenchError> {
    let (name, assignments) = arg
        .split_once('=')
        .ok_or_else(|| WorkbenchError::Usage(format!("--config `{arg}`: expected NAME=ASSIGNMENTS")))?;
    let name = name.trim();
    if name.is_empty() || name.contains(['_', '/', '\\']) {
        return Err(WorkbenchError::Usage(format!("invalid configuration name `{name}`")));
    }
    Ok((name.to_string(), Configuration::from_assignments(options, assignments)?))
}

pub fn init(root: &Path, a: &InitArgs) -> Result<Outcome, WorkbenchError> {
    let (file, source, mut configs) = match (&a.fixture, &a.program) {
        (Some(name), _) => {
            let f = fixtures::by_name(name).ok_or_else(|| {
                let known: Vec<_> = fixtures::ALL.iter().map(|f| f.name).collect();
                WorkbenchError::Usage(format!("unknown fixture `{name}`; known: {}", known.join(", ")))
            })?;
            let configs = f.named_configs(&f.program())?;
            (f.file.to_string(), f.source.to_string(), configs)
        }
        (None, Some(path)) => {
            let source = std::fs::read_to_string(path).map_err(|source| WorkbenchError::Io {
                path: path.clone(),
                source,
            })?;
            let file = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "program.mcf".into());
            (file, source, BTreeMap::new())
        }
        (None, None) => return Err(WorkbenchError::Usage("one of --fixture or --program is required".into())),
    };
    let program = perfchain::lang::parse_named(&file, &source)?;
    configs
        .entry("default".into())
        .or_insert_with(|| Configuration::defaults(&program.options));
    for arg in &a.configs {
        let (name, c) = parse_named_config(&program.options, arg)?;
        configs.insert(name, c);
    }
    let ws = Workspace::init(root, &file, &source, &a.base, configs)?;
    Ok(Outcome::ok(format!(
        "initialized {} with {} options and configurations {}\n",
        root.display(),
        ws.program.options.len(),
        ws.manifest.configs.keys().cloned().collect::<Vec<_>>().join(", ")
    )))
}

/// `n` distinct configurations drawn uniformly with a seeded generator, or
/// the whole space if it has at most `n` members.
pub fn sample_configs(options: &[OptionDecl], n: usize, seed: u64) -> Vec<Configuration> {
    if let Ok(all) = enumerate_configs(options, n) {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeSet::new();
    // The space is larger than n, so this terminates with overwhelming probability.
    while out.len() < n {
        let mut c = Configuration::new();
        for o in options {
            let v = match &o.domain {
                Domain::Bool => Value::Bool(rng.random_bool(0.5)),
                d => {
                    let vs = d.values();
                    vs[rng.random_range(0..vs.len())].clone()
                }
            };
            c.set(o.name.clone(), v);
        }
        out.insert(c);
    }
    out.into_iter().collect()
}

pub fn measure(root: &Path, a: &MeasureArgs) -> Result<Outcome, WorkbenchError> {
    let ws = Workspace::open(root)?;
    let options = &ws.program.options;
    let mut configs: BTreeSet<Configuration> = match a.sample {
        None => enumerate_configs(options, FULL_FACTORIAL_LIMIT)?.into_iter().collect(),
        Some(n) => sample_configs(options, n, a.seed).into_iter().collect(),
    };
    configs.extend(ws.manifest.configs.values().cloned());
    let configs: Vec<Configuration> = configs.into_iter().collect();
    let fresh = measure_campaign(&ws.program, &configs)?;
    let total: Seconds = fresh.iter().map(|r| r.total_time()).sum();

    let mut merged = BTreeMap::new();
    if !a.fresh && ws.has_records() {
        for r in ws.load_records()? {
            merged.insert(r.config.clone(), r);
        }
    }
    for r in fresh {
        merged.insert(r.config.clone(), r);
    }
    let records: Vec<_> = merged.into_values().collect();
    ws.save_records(&records)?;
    Ok(Outcome::ok(format!(
        "{} configurations measured, total modeled time {:.1} s; store holds {}\n",
        configs.len(),
        total,
        records.len()
    )))
}

pub fn model(root: &Path, a: &ModelArgs, format: Format) -> Result<Outcome, WorkbenchError> {
    let ws = Workspace::open(root)?;
    let records = ws.load_records()?;
    let base = a.base.clone().unwrap_or_else(|| ws.manifest.base.clone());
    let base_config = ws.config(&base)?.clone();
    let settings = FitSettings {
        max_degree: a.max_degree,
        ..FitSettings::default()
    };
    let fitted = fit_campaign(&ws.program.options, &records, &base_config, &settings)?;
    let stored = StoredModels {
        program_hash: ws.program_hash.clone(),
        base,
        base_config,
        settings,
        global: fitted.global,
        local: fitted.local,
    };
    let json = ws.save_models(&stored)?;
    let mut text = format!("global: {}\n", stored.global);
    if stored.global.approximate {
        text.push_str("approximate fit\n");
    }
    for (f, m) in &stored.local {
        if !m.terms.is_empty() {
            text.push_str(&format!("{f}: {m}\n"));
        }
    }
    Ok(Outcome::report(json, text, format, false))
}

pub fn diff_config(root: &Path, from: &str, to: &str, format: Format) -> Result<Outcome, WorkbenchError> {
    let s = Session::load(root)?;
    let r = s.influencing_options(from, to)?;
    let text = render::influencing_options(&r);
    let json = s.workspace.write_report(kind::INFLUENCING_OPTIONS, from, to, &r)?;
    Ok(Outcome::report(json, text, format, r.influences.is_empty()))
}

pub fn hotspots(root: &Path, a: &HotspotArgs, format: Format) -> Result<Outcome, WorkbenchError> {
    if !(a.min_delta.is_finite() && a.min_delta >= 0.0) {
        return Err(WorkbenchError::Usage("--min-delta must be a non-negative number of seconds".into()));
    }
    let s = Session::load(root)?;
    let r = s.option_hotspots(&a.from, &a.to, Seconds::from_secs_f64(a.min_delta))?;
    let text = render::option_hotspots(&r);
    let json = s.workspace.write_report(kind::OPTION_HOTSPOTS, &a.from, &a.to, &r)?;
    Ok(Outcome::report(json, text, format, r.hotspots.is_empty()))
}

pub fn profile_diff(root: &Path, from: &str, to: &str, format: Format) -> Result<Outcome, WorkbenchError> {
    let s = Session::load(root)?;
    let hot = s.stored_hotspots(from, to)?;
    let d = s.profile_diff(from, to, hot.as_ref())?;
    let text = render::profile_diff(&d);
    let empty = d.entries.iter().all(|e| e.delta.is_zero() && e.stack_diff.is_unchanged());
    let json = s.workspace.write_report(kind::PROFILE_DIFF, from, to, &d)?;
    Ok(Outcome::report(json, text, format, empty))
}

pub fn chain(root: &Path, from: &str, to: &str, format: Format) -> Result<Outcome, WorkbenchError> {
    let s = Session::load(root)?;
    let hot = s.stored_hotspots(from, to)?.ok_or_else(|| WorkbenchError::Missing {
        what: format!("hotspots report for {from} -> {to}"),
        hint: "run hotspots first".into(),
    })?;
    let (options, functions) = Session::chain_inputs(&hot);
    let c = s.cause_effect(from, to, &options, &functions)?;
    let file = &s.workspace.manifest.program;
    let text = render::cause_effect(&c, file, &s.workspace.source);
    let json = s.workspace.write_report(kind::CAUSE_EFFECT, from, to, &c)?;
    Ok(Outcome::report(json, text, format, c.nodes.is_empty()))
}

/// JSON text of a report exactly as `--format json` prints it.
pub fn report_json<T: Serialize>(report: &T) -> String {
    to_json(&Versioned::new(report))
}
