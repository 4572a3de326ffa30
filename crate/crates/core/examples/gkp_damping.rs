//! Finite-energy GKP states `e^{-ε n̂}|0_L⟩` as a function of ε, with the
//! lattice cutoff chosen automatically.
//!
//! cargo run --example gkp_damping

use qcs_core::engine;
use qcs_core::states::{reference, GkpSpec};

fn main() -> qcs_core::Result<()> {
    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>10}",
        "eps", "terms", "qcs2", "trend", "purity"
    );
    for eps in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 2.0, 3.0] {
        let state = GkpSpec::zero(eps).build()?;
        let r = engine::qcs(&state)?;
        println!(
            "{eps:>6.2} {:>6} {:>12.6} {:>12.6} {:>10.7}",
            r.n_terms,
            r.qcs_squared,
            reference::qcs2_gkp_approx(eps),
            r.purity
        );
    }
    Ok(())
}
