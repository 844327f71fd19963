//! The full command-line workflow, driven in-process against a temporary
//! workspace: init, measure, model and the four reports.
//!
//!     cargo run -p perfchain-workbench --example workspace_pipeline [-- density-mini]

use clap::Parser;
use workbench::cli::{run, Cli};

fn main() {
    let fixture = std::env::args().nth(1).unwrap_or_else(|| "berkeley-mini".into());
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("ws");
    let steps: &[&[&str]] = &[
        &["init", "--fixture", &fixture],
        &["measure"],
        &["model"],
        &["diff-config", "default", "user"],
        &["hotspots", "default", "user"],
        &["profile-diff", "default", "user"],
        &["chain", "default", "user"],
    ];
    for step in steps {
        let mut argv = vec!["perfchain", "--workspace", ws.to_str().unwrap()];
        argv.extend_from_slice(step);
        println!("$ perfchain {}", step.join(" "));
        match run(&Cli::parse_from(argv)) {
            Ok(out) => println!("{}(exit {})\n", out.stdout, out.code),
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(1);
            }
        }
    }
    let mut files: Vec<_> = std::fs::read_dir(ws.join("reports")).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    println!("reports written: {files:?}");
}
