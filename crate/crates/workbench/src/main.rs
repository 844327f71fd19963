use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use workbench::cli::{self, Cli, Command, EXIT_ERROR};

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = match &args.command {
        Command::Serve(s) => tokio::runtime::Runtime::new()
            .map_err(|e| e.to_string())
            .and_then(|rt| rt.block_on(workbench::server::serve(&args.workspace, s.port)).map_err(|e| e.to_string()))
            .map(|()| cli::Outcome { stdout: String::new(), code: 0 }),
        _ => cli::run(&args).map_err(|e| e.to_string()),
    };
    match result {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
