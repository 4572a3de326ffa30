//! Constructors checked against position-space wavefunctions.

use std::f64::consts::PI;

use num_complex::Complex64;
use qcs_core::states::{self, reference, BreedingSpec, Cutoff, GkpSpec, Protocol};
use qcs_core::{engine, GaussianChannel, PhasePoint};

/// Damped GKP wavefunction summed directly in position space.
fn gkp_psi(eps: f64, a: [Complex64; 2], x: f64) -> Complex64 {
    let coth = 1.0 / eps.tanh();
    let mut total = Complex64::new(0.0, 0.0);
    for (s, amp) in a.iter().enumerate() {
        for k in -40i32..=40 {
            let xs = PI.sqrt() * (2 * k + s as i32) as f64;
            let arg = -0.5 * coth * (x - xs / eps.cosh()).powi(2) - 0.5 * eps.tanh() * xs * xs;
            total += amp * arg.exp();
        }
    }
    total
}

/// `W(x, p) = (1/π) ∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy`, by trapezoid rule.
fn wigner_from_psi(psi: &dyn Fn(f64) -> Complex64, norm: f64, x: f64, p: f64) -> f64 {
    let h = 0.005;
    let mut total = Complex64::new(0.0, 0.0);
    for i in -3000..=3000 {
        let y = i as f64 * h;
        total += psi(x + y).conj() * psi(x - y) * Complex64::new(0.0, 2.0 * p * y).exp();
    }
    total.re * h / PI / norm
}

fn psi_norm(psi: &dyn Fn(f64) -> Complex64) -> f64 {
    let h = 0.005;
    (-4000..=4000)
        .map(|i| psi(i as f64 * h).norm_sqr())
        .sum::<f64>()
        * h
}

#[test]
fn gkp_wigner_matches_wavefunction() {
    let eps = 0.3;
    let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
    let spec = GkpSpec {
        epsilon: eps,
        a0: a[0],
        a1: a[1],
        cutoff: Cutoff::Adaptive,
    };
    let state = spec.build().unwrap();
    let psi = |x: f64| gkp_psi(eps, a, x);
    let norm = psi_norm(&psi);
    for &(x, p) in &[
        (0.0, 0.0),
        (0.4, -0.3),
        (1.7, 0.9),
        (-2.2, 1.4),
        (0.9, -2.5),
    ] {
        let w = state.wigner(&PhasePoint::xp(x, p)).unwrap();
        let expect = wigner_from_psi(&psi, norm, x, p);
        assert!(
            (w.re - expect).abs() < 1e-8,
            "({x},{p}): {} vs {expect}",
            w.re
        );
        assert!(w.im.abs() < 1e-10);
    }
}

#[test]
fn gkp_qcs_matches_wavefunction_variances() {
    for eps in [0.15, 0.3, 0.6] {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let psi = |x: f64| gkp_psi(eps, a, x);
        let h = 0.002;
        let xs: Vec<f64> = (-12000..=12000).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| psi(x).re).collect();
        let norm: f64 = vals.iter().map(|v| v * v).sum::<f64>() * h;
        let x2: f64 = xs
            .iter()
            .zip(&vals)
            .map(|(x, v)| x * x * v * v)
            .sum::<f64>()
            * h
            / norm;
        let dpsi2: f64 = vals
            .windows(3)
            .map(|w| ((w[2] - w[0]) / (2.0 * h)).powi(2))
            .sum::<f64>()
            * h
            / norm;
        // Real even wavefunction: zero means, so QCS² = ⟨x²⟩ + ⟨p²⟩.
        let expect = x2 + dpsi2;
        let got = engine::qcs(&states::gkp(eps).unwrap()).unwrap().qcs_squared;
        assert!(
            (got - expect).abs() < 1e-5 * expect,
            "ε={eps}: {got} vs {expect}"
        );
    }
}

#[test]
fn gkp_decreases_toward_vacuum() {
    let q3 = engine::qcs(&states::gkp(3.0).unwrap()).unwrap().qcs_squared;
    assert!(q3 > 1.0 && q3 < 1.01);
    let mut last = f64::INFINITY;
    for eps in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6] {
        let q = engine::qcs(&states::gkp(eps).unwrap()).unwrap().qcs_squared;
        assert!(q < last && q > 1.0, "ε={eps}: {q}");
        last = q;
    }
}

#[test]
fn complex_cat_is_rotation_of_real_cat() {
    let theta = 0.83;
    let a = 1.7;
    let rotated = GaussianChannel::rotation(theta)
        .apply(&states::cat(a))
        .unwrap();
    let direct = states::cat(Complex64::from_polar(a, theta));
    for &(x, p) in &[(0.0, 0.0), (1.0, 0.5), (-2.0, 1.3), (0.3, -2.2)] {
        let pt = PhasePoint::xp(x, p);
        let u = rotated.wigner(&pt).unwrap();
        let v = direct.wigner(&pt).unwrap();
        assert!((u - v).norm() < 1e-12, "{u} vs {v}");
    }
    let q = engine::qcs(&direct).unwrap().qcs_squared;
    assert!((q - reference::qcs2_cat(a)).abs() < 1e-9 * q);
}

/// Positions of the positive local maxima of `W(x, 0)` above `floor`.
fn peaks(state: &qcs_core::GaussianSumState, half_width: f64, floor: f64) -> Vec<f64> {
    let ev = state.evaluator().unwrap();
    let h = 1e-3;
    let n = (2.0 * half_width / h) as i64;
    let w: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = -half_width + i as f64 * h;
            (x, ev.value(&[x, 0.0]).unwrap().re)
        })
        .collect();
    w.windows(3)
        .filter(|t| t[1].1 > t[0].1 && t[1].1 >= t[2].1 && t[1].1 > floor)
        .map(|t| t[1].0)
        .collect()
}

#[test]
fn bred_state_has_even_peak_comb() {
    for protocol in [Protocol::Slow, Protocol::Efficient] {
        let spec = BreedingSpec::new(BreedingSpec::gkp_amplitude(3), -(0.3f64.ln()), 3, protocol);
        let s = spec.build().unwrap();
        let max = peaks(&s, 12.0, 0.0)
            .iter()
            .map(|&x| s.wigner(&PhasePoint::xp(x, 0.0)).unwrap().re)
            .fold(0.0, f64::max);
        let found = peaks(&s, 12.0, 0.2 * max);
        assert!(found.len() >= 3, "{protocol:?}: {found:?}");
        // Wigner fringes sit halfway between the wavefunction peaks.
        let step = spec.spacing() / 2.0;
        for pair in found.windows(2) {
            assert!(
                (pair[1] - pair[0] - step).abs() < 0.02,
                "{protocol:?}: {found:?} step {step}"
            );
        }
        // Recentred comb is symmetric about the origin.
        let mid = (found[0] + found[found.len() - 1]) / 2.0;
        assert!(mid.abs() < 0.02, "{protocol:?}: centre {mid}");
    }
}

#[test]
fn breeding_round_zero_is_squeezed_cat() {
    let r = -(0.2f64.ln());
    let a = BreedingSpec::gkp_amplitude(0);
    let q = engine::qcs(&BreedingSpec::new(a, r, 0, Protocol::Slow).build().unwrap())
        .unwrap()
        .qcs_squared;
    let expect = reference::qcs2_squeezed_cat(a, r);
    assert!((q - expect).abs() < 1e-9 * expect, "{q} vs {expect}");
}

#[test]
fn squeezed_loss_closed_form() {
    for r in [0.3, 1.0, 1.7] {
        for eta in [0.9, 0.6, 0.2] {
            let s = GaussianChannel::loss(eta, 1)
                .unwrap()
                .apply(&states::squeezed_vacuum(r))
                .unwrap();
            let q = engine::qcs(&s).unwrap().qcs_squared;
            let expect = reference::qcs2_squeezed_lossy(r, eta);
            assert!((q - expect).abs() < 1e-12 * expect, "r={r} η={eta}");
        }
    }
}
