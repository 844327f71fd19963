//! Trace a slowdown from the options that cause it to the code that pays for
//! it: dependence graph, slices, a chop and the method-level chain.
//!
//!     cargo run -p perfchain --example cause_effect_chain

use std::collections::BTreeSet;

use perfchain::fixtures::DENSITY_MINI;
use perfchain::interp::execute;
use perfchain::lang::{line_col, option_load_sites};
use perfchain::slice::{build_dependence_graph, cause_effect_chain};

fn main() {
    let fx = DENSITY_MINI;
    let program = fx.program();
    let graph = build_dependence_graph(&program);
    println!("dependence graph: {} nodes, {} edges", graph.nodes().len(), graph.edges().len());

    let format_reads = option_load_sites(&program)["Format"].clone();
    let defect = fx.defect_node(&program);
    let backward = graph.backward_slice(&BTreeSet::from([defect])).unwrap();
    let forward = graph.forward_slice(&format_reads, graph.nodes()).unwrap();
    let chop = graph.chop(&format_reads, &BTreeSet::from([defect])).unwrap();
    println!(
        "defect statement: backward slice {}, forward slice of Format {}, chop {}",
        backward.len(),
        forward.len(),
        chop.len()
    );

    let named = fx.named_configs(&program).unwrap();
    let mut coverage = BTreeSet::new();
    for name in [fx.good, fx.bad] {
        coverage.extend(execute(&program, &named[name]).unwrap().coverage);
    }
    let options = BTreeSet::from(["Format".to_string()]);
    let hotspots = BTreeSet::from(["Encoder.encode".to_string()]);
    let chain = cause_effect_chain(&program, &graph, &options, &hotspots, &coverage).unwrap();

    println!("\nchain {}", chain.chop_id);
    for n in &chain.method_graph.nodes {
        println!("  {:?} {}", n.role, n.function);
    }
    for e in &chain.method_graph.edges {
        println!("  {} -> {} ({} statement edges)", e.from, e.to, e.witnesses.len());
    }
    for h in &chain.highlights[fx.file] {
        let (line, col) = line_col(fx.source, h.span.start);
        let text = fx.source[h.span.start..h.span.end].lines().next().unwrap();
        let mark = if h.node == defect { "  <-- planted defect" } else { "" };
        println!("  {line:>3}:{col:<3} {}{mark}", text.trim());
    }
}
