//! Execute a fixture under its two named configurations and print the
//! hotspot view: functions by total time, with the call stacks behind it.
//!
//!     cargo run -p perfchain --example profile_run

use perfchain::fixtures::BERKELEY_MINI;
use perfchain::interp::{execute, hotspot_view};

fn main() {
    let program = BERKELEY_MINI.program();
    let named = BERKELEY_MINI.named_configs(&program).unwrap();
    for name in [BERKELEY_MINI.good, BERKELEY_MINI.bad] {
        let record = execute(&program, &named[name]).unwrap();
        println!("== {name} {}  total {:.1} s, {} nodes covered", named[name], record.total_time(), record.coverage.len());
        for e in hotspot_view(&record).entries {
            println!("{:<20} total {:>6.1}  self {:>6.1}", e.function, e.total, e.self_time);
            for t in &e.back_traces {
                println!("    {:>6.1}  {}", t.time, t.stack.join(" <- "));
            }
        }
        println!();
    }
}
