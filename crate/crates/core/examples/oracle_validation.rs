//! Grid quadrature next to the closed-form sums for a few states, plus the
//! lossy Fock states, which have no Gaussian-sum form.
//!
//! cargo run --release --example oracle_validation

use qcs_core::oracle::{self, GridSpec};
use qcs_core::states::{cat, gkp, squeezed_vacuum};
use qcs_core::{engine, GaussianChannel, GaussianSumState};

fn main() -> qcs_core::Result<()> {
    let cases: Vec<(&str, GaussianSumState)> = vec![
        ("squeezed(0.8)", squeezed_vacuum(0.8)),
        ("cat(1.5)", cat(1.5)),
        (
            "loss(0.7) cat(1.5)",
            GaussianChannel::loss(0.7, 1)?.apply(&cat(1.5))?,
        ),
        ("gkp(0.3)", gkp(0.3)?),
    ];
    println!(
        "{:<20} {:>14} {:>14} {:>10}",
        "state", "engine", "quadrature", "rel diff"
    );
    for (name, s) in &cases {
        let e = engine::qcs(s)?.qcs_squared;
        let q = oracle::qcs_numeric_state(s, &oracle::auto_grid(s)?)?.qcs_squared;
        println!(
            "{name:<20} {e:>14.10} {q:>14.10} {:>10.2e}",
            (q - e).abs() / e
        );
    }
    let grid = GridSpec::centered(10.0, 801)?;
    for k in 0..=4 {
        let q = oracle::qcs_numeric(&oracle::fock_lossy_wigner(k), &grid)?;
        println!("fock k={k} after 50% loss: qcs2 = {:.10}", q.qcs_squared);
    }
    Ok(())
}
