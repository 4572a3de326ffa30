//! QCS of a cat state under increasing loss. The curve reaches 1 at η = 1/2
//! and drops below afterwards.
//!
//! cargo run --example lossy_cat_sweep -- 2.0

use qcs_core::states::{cat, reference};
use qcs_core::{engine, GaussianChannel};

fn main() -> qcs_core::Result<()> {
    let alpha: f64 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("alpha must be a number"))
        .unwrap_or(2.0);
    let state = cat(alpha);
    println!("eta,qcs_squared,closed_form,purity");
    for i in 0..=14 {
        let eta = 1.0 - 0.05 * i as f64;
        let out = GaussianChannel::loss(eta, 1)?.apply(&state)?;
        let r = engine::qcs(&out)?;
        println!(
            "{eta:.2},{:.12},{:.12},{:.8}",
            r.qcs_squared,
            reference::qcs2_cat_lossy(alpha, eta),
            r.purity
        );
    }
    let slope = reference::cat_decay_slope(alpha);
    println!("# slope at eta=1: {slope:.6}");
    Ok(())
}
