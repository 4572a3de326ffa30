//! Closed-form QCS of even cat states against `1 + 2α² tanh α²`.
//!
//! cargo run --example cat_state

use qcs_core::engine;
use qcs_core::states::{cat, reference};

fn main() -> qcs_core::Result<()> {
    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "alpha", "engine", "closed form", "purity"
    );
    for alpha in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
        let report = engine::qcs(&cat(alpha))?;
        println!(
            "{alpha:>6.2} {:>14.10} {:>14.10} {:>10.6}",
            report.qcs_squared,
            reference::qcs2_cat(alpha),
            report.purity
        );
    }
    Ok(())
}
