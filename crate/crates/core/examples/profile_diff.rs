//! Compare the profiles of two runs function by function, including how the
//! call stacks leading to each function changed.
//!
//!     cargo run -p perfchain --example profile_diff

use perfchain::fixtures::BERKELEY_MINI;
use perfchain::interp::{execute, hotspot_view};
use perfchain::profile_diff::{diff_hotspot_views, DISPLAY_THRESHOLD};

fn main() {
    let program = BERKELEY_MINI.program();
    let named = BERKELEY_MINI.named_configs(&program).unwrap();
    let a = hotspot_view(&execute(&program, &named["default"]).unwrap());
    let b = hotspot_view(&execute(&program, &named["user"]).unwrap());
    let diff = diff_hotspot_views(&a, &b);

    let visible = diff.visible(DISPLAY_THRESHOLD);
    for e in &visible.rows {
        println!(
            "{:<18} {:>6.1} -> {:>6.1}  {:+7.1}  {:?}",
            e.function, e.time_a, e.time_b, e.delta, e.status
        );
        for s in &e.stack_diff.only_b {
            println!("    new stack {:.1} s: {}", s.time_b, s.stack.join(" <- "));
        }
        for s in &e.stack_diff.only_a {
            println!("    gone stack {:.1} s: {}", s.time_a, s.stack.join(" <- "));
        }
    }
    if visible.hidden > 0 {
        println!("{} small functions hidden", visible.hidden);
    }
    println!("sum of self-time deltas {:+.1} s", diff.self_delta_sum());
}
