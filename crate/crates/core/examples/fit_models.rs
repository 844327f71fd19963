//! Fit performance-influence models: exact inversion over the full factorial,
//! stepwise regression over a sample, and per-function local models.
//!
//!     cargo run -p perfchain --example fit_models

use perfchain::config::Configuration;
use perfchain::fixtures::BERKELEY_MINI;
use perfchain::interp::measure_campaign;
use perfchain::model::{enumerate_configs, fit_campaign, fit_exact, fit_sampled, FitSettings, Term};
use perfchain::seconds::Seconds;

fn main() {
    let program = BERKELEY_MINI.program();
    let configs = enumerate_configs(&program.options, 1 << 10).unwrap();
    let records = measure_campaign(&program, &configs).unwrap();
    let base = Configuration::defaults(&program.options);
    let settings = FitSettings::default();
    let timings: Vec<_> = records.iter().map(|r| (r.config.clone(), r.total_time())).collect();

    let exact = fit_exact(&program.options, &timings, &base, &settings).unwrap();
    println!("exact, {} configurations:\n  {exact}", timings.len());

    let sample: Vec<_> = timings.iter().step_by(3).cloned().collect();
    let sampled = fit_sampled(&program.options, &sample, &base, &settings).unwrap();
    let worst = sampled.residuals.iter().map(|r| r.residual.abs()).max().unwrap_or(Seconds::ZERO);
    println!("stepwise, {} configurations:\n  {sampled}\n  largest residual {worst}", sample.len());

    let models = fit_campaign(&program.options, &records, &base, &settings).unwrap();
    println!("local models:");
    for (function, m) in &models.local {
        println!("  {function:<18} {m}");
    }
    let interaction = Term::of_bools(&["Duplicates", "Transactions"]);
    let sum: Seconds = models.local.values().map(|m| m.coefficient(&interaction)).sum();
    println!("{interaction}: global {}, sum of local {sum}", models.global.coefficient(&interaction));
}
