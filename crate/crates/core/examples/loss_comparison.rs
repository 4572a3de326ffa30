//! Cat, GKP and squeezed states that start near the same QCS, followed
//! through a loss channel.
//!
//! cargo run --example loss_comparison

use qcs_core::states::{cat, gkp, squeezed_vacuum};
use qcs_core::{engine, GaussianChannel};

fn main() -> qcs_core::Result<()> {
    let states = [
        ("gkp(0.05)", gkp(0.05)?),
        ("squeezed(1.7)", squeezed_vacuum(1.7)),
        ("cat(2.8)", cat(2.8)),
    ];
    print!("eta");
    for (name, _) in &states {
        print!(",{name}");
    }
    println!();
    for i in 0..=20 {
        let eta = 1.0 - 0.025 * i as f64;
        let loss = GaussianChannel::loss(eta, 1)?;
        print!("{eta:.3}");
        for (_, s) in &states {
            print!(",{:.6}", engine::qcs(&loss.apply(s)?)?.qcs_squared);
        }
        println!();
    }
    Ok(())
}
