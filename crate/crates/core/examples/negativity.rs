//! Negative Wigner volume of lossy cat states as the amplitude grows.
//!
//! cargo run --release --example negativity -- 0.9

use qcs_core::oracle;
use qcs_core::states::cat;
use qcs_core::{engine, GaussianChannel};

fn main() -> qcs_core::Result<()> {
    let eta: f64 = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("eta must be a number"))
        .unwrap_or(0.9);
    let loss = GaussianChannel::loss(eta, 1)?;
    println!("alpha,negativity,min_w,qcs_squared");
    for i in 0..12 {
        let alpha = 0.5 + 0.5 * i as f64;
        let s = loss.apply(&cat(alpha))?;
        let grid = oracle::auto_grid(&s)?;
        let neg = oracle::refined(&grid, 3201, |g| oracle::negativity_volume(&s, g))?;
        let min = oracle::wigner_min(&s, &grid)?;
        println!(
            "{alpha:.2},{neg:.8},{min:.3e},{:.6}",
            engine::qcs(&s)?.qcs_squared
        );
    }
    Ok(())
}
