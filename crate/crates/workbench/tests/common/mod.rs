#![allow(dead_code)]

use std::path::Path;

use clap::Parser;
use workbench::cli::{run, Cli, Outcome};
use workbench::WorkbenchError;

pub fn cli(ws: &Path, args: &[&str]) -> Result<Outcome, WorkbenchError> {
    let mut argv = vec!["perfchain".to_string(), "--workspace".into(), ws.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(&Cli::try_parse_from(argv).expect("valid arguments"))
}

pub fn ok(ws: &Path, args: &[&str]) -> Outcome {
    cli(ws, args).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

/// init, full measurement and model fit for a bundled fixture.
pub fn prepared(ws: &Path, fixture: &str) {
    ok(ws, &["init", "--fixture", fixture]);
    ok(ws, &["measure"]);
    ok(ws, &["model"]);
}

/// The whole report pipeline for one pair of configurations.
pub fn pipeline(ws: &Path, fixture: &str, from: &str, to: &str, sample: Option<(usize, u64)>) {
    ok(ws, &["init", "--fixture", fixture]);
    match sample {
        None => ok(ws, &["measure"]),
        Some((n, seed)) => ok(ws, &["measure", "--sample", &n.to_string(), "--seed", &seed.to_string()]),
    };
    ok(ws, &["model"]);
    for cmd in ["diff-config", "hotspots", "profile-diff", "chain"] {
        ok(ws, &[cmd, from, to]);
    }
}
