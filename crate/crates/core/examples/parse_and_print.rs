//! Parse a program (a bundled fixture, or the file given as argument), print
//! it back in canonical form and list where each option is read.
//!
//!     cargo run -p perfchain --example parse_and_print [-- path/to/program.mcf]

use perfchain::fixtures::BERKELEY_MINI;
use perfchain::lang::{line_col, option_load_sites, parse_named, pretty_print, NodeTable};

fn main() {
    let (name, source) = match std::env::args().nth(1) {
        Some(path) => {
            let src = std::fs::read_to_string(&path).expect("readable program file");
            (path, src)
        }
        None => (BERKELEY_MINI.file.to_string(), BERKELEY_MINI.source.to_string()),
    };
    let program = match parse_named(&name, &source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{name}: {e}");
            std::process::exit(1);
        }
    };
    print!("{}", pretty_print(&program));

    let table = NodeTable::new(&program);
    println!("\n{} nodes, {} functions", table.len(), program.functions.len());
    for (option, sites) in option_load_sites(&program) {
        let at: Vec<String> = sites
            .iter()
            .map(|id| {
                let info = table.get(*id).unwrap();
                let (line, col) = line_col(&source, info.span.start);
                format!("{}:{line}:{col}", info.function.as_deref().unwrap_or("?"))
            })
            .collect();
        println!("{option:<14} read at {}", if at.is_empty() { "nowhere".into() } else { at.join(", ") });
    }
}
