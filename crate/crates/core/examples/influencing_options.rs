//! Explain the slowdown between two configurations: which changed options
//! account for it, and in which functions it shows up.
//!
//!     cargo run -p perfchain --example influencing_options

use perfchain::config::Configuration;
use perfchain::fixtures::BERKELEY_MINI;
use perfchain::interp::measure_campaign;
use perfchain::model::{diff_influence, enumerate_configs, fit_campaign, option_hotspots, FitSettings};
use perfchain::seconds::Seconds;

fn main() {
    let program = BERKELEY_MINI.program();
    let records = measure_campaign(&program, &enumerate_configs(&program.options, 1 << 10).unwrap()).unwrap();
    let base = Configuration::defaults(&program.options);
    let models = fit_campaign(&program.options, &records, &base, &FitSettings::default()).unwrap();
    let named = BERKELEY_MINI.named_configs(&program).unwrap();
    let (from, to) = (&named["default"], &named["user"]);

    let report = diff_influence(&models.global, from, to).unwrap();
    println!("{:.1} s -> {:.1} s", report.from_time, report.to_time);
    for c in &report.changed {
        println!("  changed {} {} -> {}", c.option, c.from, c.to);
    }
    for i in &report.influences {
        println!("  {:<26} {:+.1} s", i.options.join(", "), i.delta);
    }
    if !report.unexplained_changes.is_empty() {
        println!("  no influence: {}", report.unexplained_changes.join(", "));
    }

    let hot = option_hotspots(&models.local, from, to, Seconds::from_secs_f64(0.05)).unwrap();
    println!("option hotspots:");
    for h in &hot.hotspots {
        println!("  {:<18} {:+.1} s  via {}", h.function, h.delta, h.options.join(", "));
    }
}
