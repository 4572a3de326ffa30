//! Two-mode product states and loss on both modes.
//!
//! cargo run --example two_mode

use qcs_core::states::{cat, squeezed_vacuum, vacuum};
use qcs_core::{engine, GaussianChannel};

fn main() -> qcs_core::Result<()> {
    let pairs = [
        ("cat(1.5) x vacuum", cat(1.5).tensor(&vacuum(1))),
        ("cat(1) x cat(2)", cat(1.0).tensor(&cat(2.0))),
        (
            "squeezed(1) x squeezed(0.5)",
            squeezed_vacuum(1.0).tensor(&squeezed_vacuum(0.5)),
        ),
    ];
    for (name, s) in &pairs {
        print!("{name:<30}");
        for eta in [1.0, 0.75, 0.5] {
            let out = GaussianChannel::loss(eta, 2)?.apply(s)?;
            print!(" eta={eta:.2}: {:>9.5}", engine::qcs(&out)?.qcs_squared);
        }
        println!();
    }
    // Pure states: QCS² equals the mean covariance trace per mode.
    let s = &pairs[0].1;
    let trace = engine::qcs_pure_from_covariance(&s.moments()?.cov, 2)?;
    println!("cat(1.5) x vacuum from the covariance trace: {trace:.10}");
    Ok(())
}
