//! Slow and efficient breeding from squeezed cats, post-selected on p = 0.
//!
//! cargo run --example breeding

use qcs_core::engine;
use qcs_core::states::{BreedingSpec, GkpSpec, Protocol};

fn main() -> qcs_core::Result<()> {
    for r in [-(0.2f64.ln()), -(0.3f64.ln())] {
        let eps = (-2.0 * r).exp().atanh();
        let target = engine::qcs(&GkpSpec::zero(eps).build()?)?.qcs_squared;
        println!("r = {r:.4}  (GKP with matched peak width: {target:.4})");
        println!(
            "{:>3} {:>8} {:>12} {:>12}",
            "M", "alpha", "slow", "efficient"
        );
        for m in 0..=4 {
            let alpha = BreedingSpec::gkp_amplitude(m);
            let slow = BreedingSpec::new(alpha, r, m, Protocol::Slow).build()?;
            let fast = BreedingSpec::new(alpha, r, m, Protocol::Efficient).build()?;
            println!(
                "{m:>3} {alpha:>8.4} {:>12.6} {:>12.6}",
                engine::qcs(&slow)?.qcs_squared,
                engine::qcs(&fast)?.qcs_squared
            );
        }
        println!();
    }
    Ok(())
}
