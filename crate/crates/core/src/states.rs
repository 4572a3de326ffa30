//! Constructors for the standard Gaussian-sum states.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::GaussianChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RMatrix, RVector, I};
use crate::state::{log_of, GaussianSumState, GaussianTerm};

/// Default cap on the number of terms a constructor may produce.
pub const DEFAULT_MAX_TERMS: usize = 20_000;

fn single(term: GaussianTerm, n_modes: usize) -> GaussianSumState {
    GaussianSumState::new(n_modes, vec![term]).expect("single well-formed term")
}

pub fn vacuum(n_modes: usize) -> GaussianSumState {
    let dim = 2 * n_modes;
    single(
        GaussianTerm::real(
            1.0,
            &RVector::zeros(dim),
            &(RMatrix::identity(dim, dim) * 0.5),
        )
        .expect("vacuum term"),
        n_modes,
    )
}

/// Coherent state `|α⟩` with mean `√2 (Re α, Im α)`.
pub fn coherent(alpha: Complex64) -> GaussianSumState {
    let mean = RVector::from_vec(vec![SQRT_2 * alpha.re, SQRT_2 * alpha.im]);
    single(
        GaussianTerm::real(1.0, &mean, &(RMatrix::identity(2, 2) * 0.5)).expect("coherent term"),
        1,
    )
}

/// `S(r)|0⟩` with covariance `diag(e^{-2r}, e^{2r}) / 2`.
pub fn squeezed_vacuum(r: f64) -> GaussianSumState {
    let cov = RMatrix::from_diagonal(&RVector::from_vec(vec![
        (-2.0 * r).exp() / 2.0,
        (2.0 * r).exp() / 2.0,
    ]));
    single(
        GaussianTerm::real(1.0, &RVector::zeros(2), &cov).expect("squeezed term"),
        1,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatSpec {
    pub alpha: Complex64,
}

impl CatSpec {
    pub fn build(&self) -> GaussianSumState {
        let alpha = self.alpha;
        let a2 = alpha.norm_sqr();
        // 𝒩 = (2 + 2e^{-2|α|²})⁻¹, kept in log form.
        let log_norm = -(2.0f64.ln() + (-2.0 * a2).exp().ln_1p());
        let cov = linalg::to_complex(&(RMatrix::identity(2, 2) * 0.5));
        let outer = CVector::from_vec(vec![
            Complex64::new(SQRT_2 * alpha.re, 0.0),
            Complex64::new(SQRT_2 * alpha.im, 0.0),
        ]);
        let fringe = CVector::from_vec(vec![I * (SQRT_2 * alpha.im), -I * (SQRT_2 * alpha.re)]);
        let peak = Complex64::new(log_norm, 0.0);
        let cross = Complex64::new(log_norm - 2.0 * a2, 0.0);
        let terms = vec![
            GaussianTerm::from_log_coeff(peak, outer.clone(), cov.clone()),
            GaussianTerm::from_log_coeff(peak, -outer, cov.clone()),
            GaussianTerm::from_log_coeff(cross, fringe.clone(), cov.clone()),
            GaussianTerm::from_log_coeff(cross, fringe.map(|z| z.conj()), cov),
        ]
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .expect("cat terms are well formed");
        GaussianSumState::new(1, terms)
            .and_then(GaussianSumState::renormalized)
            .expect("cat state normalizes")
    }
}

/// Even cat state `√𝒩 (|α⟩ + |-α⟩)`.
pub fn cat(alpha: impl Into<Complex64>) -> GaussianSumState {
    CatSpec {
        alpha: alpha.into(),
    }
    .build()
}

/// How far the GKP lattice sum is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// Smallest `K >= ceil(3/√ε)` whose first dropped ring has peak weight
    /// below `1e-14` of the largest kept term.
    Adaptive,
    /// `k, l ∈ [-K, K]`.
    Fixed(u32),
}

/// Threshold of the adaptive lattice cutoff.
pub const GKP_ADAPTIVE_TOL: f64 = 1e-14;
/// A fixed cutoff whose dropped ring exceeds this fraction is rejected.
pub const GKP_FIXED_TOL: f64 = 1e-10;

/// Fock-damped GKP state `e^{-ε n̂}(a0|0⟩ + a1|1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkpSpec {
    pub epsilon: f64,
    pub a0: Complex64,
    pub a1: Complex64,
    pub cutoff: Cutoff,
}

impl GkpSpec {
    /// Logical zero.
    pub fn zero(epsilon: f64) -> Self {
        GkpSpec {
            epsilon,
            a0: Complex64::new(1.0, 0.0),
            a1: Complex64::new(0.0, 0.0),
            cutoff: Cutoff::Adaptive,
        }
    }

    pub fn with_cutoff(mut self, cutoff: Cutoff) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn amplitude(&self, s: u8) -> Complex64 {
        if s == 0 {
            self.a0
        } else {
            self.a1
        }
    }

    fn logicals(&self) -> Vec<u8> {
        [0u8, 1]
            .into_iter()
            .filter(|&s| self.amplitude(s).norm() > 0.0)
            .collect()
    }

    /// Term for lattice index `(k, l, s, t)`: covariance `½ diag(tanh ε, coth ε)`,
    /// the Fock-damped cross term `|ψ_{2k+t}⟩⟨ψ_{2l+s}|`.
    fn term(&self, k: i64, l: i64, s: u8, t: u8) -> GaussianTerm {
        let eps = self.epsilon;
        let (s_, t_) = (s as f64, t as f64);
        let (k, l) = (k as f64, l as f64);
        let sum = 2.0 * k + 2.0 * l + s_ + t_;
        let diff = -2.0 * k + 2.0 * l + s_ - t_;
        let half_sqrt_pi = PI.sqrt() / 2.0;
        let mean = CVector::from_vec(vec![
            Complex64::new(half_sqrt_pi * sum / eps.cosh(), 0.0),
            Complex64::new(0.0, half_sqrt_pi * diff / eps.sinh()),
        ]);
        let cov = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(eps.tanh() / 2.0, 0.0),
            Complex64::new(1.0 / (2.0 * eps.tanh()), 0.0),
        ]));
        let x_ket = 2.0 * k + t_;
        let x_bra = 2.0 * l + s_;
        let log_mag = PI / 2.0 / (2.0 * eps).sinh() * sum * sum
            - PI / 2.0 / eps.tanh() * (x_ket * x_ket + x_bra * x_bra);
        let amp = self.amplitude(t) * self.amplitude(s).conj();
        GaussianTerm::from_log_coeff(log_of(amp) + log_mag, mean, cov).expect("gkp term")
    }

    fn ring_max(&self, k_max: i64, logicals: &[u8]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for k in -k_max..=k_max {
            for l in -k_max..=k_max {
                if k.abs() != k_max && l.abs() != k_max {
                    continue;
                }
                for &s in logicals {
                    for &t in logicals {
                        best = best.max(self.term(k, l, s, t).peak_log_weight());
                    }
                }
            }
        }
        best
    }

    fn box_max(&self, k_max: i64, logicals: &[u8]) -> f64 {
        (0..=k_max)
            .map(|k| self.ring_max(k, logicals))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn build(&self) -> Result<GaussianSumState> {
        self.build_capped(DEFAULT_MAX_TERMS)
    }

    pub fn build_capped(&self, max_terms: usize) -> Result<GaussianSumState> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "GKP damping must be positive, got {}",
                self.epsilon
            )));
        }
        let logicals = self.logicals();
        if logicals.is_empty() {
            return Err(Error::InvalidParameter(
                "GKP logical amplitudes are both zero".into(),
            ));
        }
        let per_cell = logicals.len() * logicals.len();
        let count = |k: i64| (2 * k as usize + 1).pow(2) * per_cell;
        let k_max = match self.cutoff {
            Cutoff::Fixed(k) => {
                let k = k as i64;
                let ratio = (self.ring_max(k + 1, &logicals) - self.box_max(k, &logicals)).exp();
                if ratio > GKP_FIXED_TOL {
                    return Err(Error::TruncationTooTight { ratio });
                }
                k
            }
            Cutoff::Adaptive => {
                let mut k = (3.0 / self.epsilon.sqrt()).ceil().max(1.0) as i64;
                let kept = self.box_max(k, &logicals);
                while self.ring_max(k + 1, &logicals) - kept > GKP_ADAPTIVE_TOL.ln() {
                    k += 1;
                    if count(k) > max_terms {
                        break;
                    }
                }
                k
            }
        };
        if count(k_max) > max_terms {
            return Err(Error::TermCapExceeded {
                terms: count(k_max),
                cap: max_terms,
            });
        }
        let mut terms = Vec::with_capacity(count(k_max));
        for k in -k_max..=k_max {
            for l in -k_max..=k_max {
                for &s in &logicals {
                    for &t in &logicals {
                        terms.push(self.term(k, l, s, t));
                    }
                }
            }
        }
        GaussianSumState::new(1, terms)?.renormalized()
    }
}

/// Logical-zero GKP state with adaptive cutoff.
pub fn gkp(epsilon: f64) -> Result<GaussianSumState> {
    GkpSpec::zero(epsilon).build()
}

/// Wigner term of `D(β)S(r)|0⟩⟨0|S†(r)D†(δ)` for real `β, δ`, including the
/// overlap prefactor `exp(-½ e^{2r} (β-δ)²)`.
pub fn displaced_squeezed_cross_term(beta: f64, delta: f64, r: f64) -> GaussianTerm {
    cross_term(0.0, beta, delta, r)
}

fn cross_term(log_weight: f64, beta: f64, delta: f64, r: f64) -> GaussianTerm {
    let e2r = (2.0 * r).exp();
    let cov = CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::new(1.0 / (2.0 * e2r), 0.0),
        Complex64::new(e2r / 2.0, 0.0),
    ]));
    let mean = CVector::from_vec(vec![
        Complex64::new((beta + delta) / SQRT_2, 0.0),
        Complex64::new(0.0, e2r * (delta - beta) / SQRT_2),
    ]);
    let log_c = log_weight - 0.5 * e2r * (beta - delta).powi(2);
    GaussianTerm::from_log_coeff(Complex64::new(log_c, 0.0), mean, cov).expect("cross term")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// One fresh squeezed cat per round: `M + 1` displacement steps.
    Slow,
    /// The bred state is fed to both ports: `2^M` displacement steps.
    Efficient,
}

/// Breeding output post-selected on `p = 0` at every round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreedingSpec {
    pub alpha: f64,
    pub r: f64,
    pub rounds: u32,
    pub protocol: Protocol,
    pub recenter: bool,
}

impl BreedingSpec {
    /// Amplitude giving a final peak spacing of `2√π` after `rounds` rounds.
    pub fn gkp_amplitude(rounds: u32) -> f64 {
        (2.0f64.powi(rounds as i32 + 1) * PI).sqrt()
    }

    pub fn new(alpha: f64, r: f64, rounds: u32, protocol: Protocol) -> Self {
        BreedingSpec {
            alpha,
            r,
            rounds,
            protocol,
            recenter: true,
        }
    }

    /// Number of displacement steps `K` in `Σ_{k=0}^{K} binom(K,k) D(k α/√2^M)`.
    pub fn steps(&self) -> Result<u64> {
        match self.protocol {
            Protocol::Slow => Ok(self.rounds as u64 + 1),
            Protocol::Efficient => 1u64
                .checked_shl(self.rounds)
                .filter(|&k| k < (1 << 40))
                .ok_or_else(|| Error::InvalidParameter("too many breeding rounds".into())),
        }
    }

    pub fn term_count(&self) -> Result<u64> {
        let k = self.steps()?;
        Ok((k + 1) * (k + 1))
    }

    /// Spacing of the peaks of `W(x, 0)`.
    pub fn spacing(&self) -> f64 {
        self.alpha / 2.0f64.powf((self.rounds as f64 - 1.0) / 2.0)
    }

    pub fn build(&self) -> Result<GaussianSumState> {
        self.build_capped(DEFAULT_MAX_TERMS)
    }

    pub fn build_capped(&self, max_terms: usize) -> Result<GaussianSumState> {
        if !self.alpha.is_finite() || !self.r.is_finite() {
            return Err(Error::InvalidParameter(
                "breeding parameters must be finite".into(),
            ));
        }
        let count = self.term_count()?;
        if count > max_terms as u64 {
            return Err(Error::TermCapExceeded {
                terms: count as usize,
                cap: max_terms,
            });
        }
        let k_max = self.steps()? as usize;
        let step = self.alpha / 2.0f64.powf(self.rounds as f64 / 2.0);
        let log_binom = log_binomials(k_max);
        let mut terms = Vec::with_capacity(count as usize);
        for (k, lk) in log_binom.iter().enumerate() {
            for (kp, lkp) in log_binom.iter().enumerate() {
                terms.push(cross_term(
                    lk + lkp,
                    k as f64 * step,
                    kp as f64 * step,
                    self.r,
                ));
            }
        }
        let state = GaussianSumState::new(1, terms)?.renormalized()?;
        if self.recenter {
            // Centroid of the comb: x = √2 · (K/2) · step.
            let shift = SQRT_2 * k_max as f64 / 2.0 * step;
            GaussianChannel::displacement(&[-shift, 0.0]).apply(&state)
        } else {
            Ok(state)
        }
    }
}

fn log_binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += ((n - k + 1) as f64).ln() - (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Closed-form QCS² expressions for the standard families.
pub mod reference {
    /// Pure even cat: `1 + 2|α|² tanh|α|²`.
    pub fn qcs2_cat(alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        1.0 + 2.0 * a2 * a2.tanh()
    }

    /// Even cat after a loss channel of transmissivity `eta`.
    pub fn qcs2_cat_lossy(alpha: f64, eta: f64) -> f64 {
        let a2 = alpha * alpha;
        let x = 4.0 * a2 * eta - 2.0 * a2;
        // Divide through by cosh(2|α|²) to stay finite for large amplitudes.
        let c = (2.0 * a2).cosh();
        if c.is_finite() {
            1.0 + 4.0 * eta * a2 * x.sinh() / (x.cosh() + c + 2.0)
        } else {
            let y = 2.0 * a2;
            let num = 0.5 * ((x - y).exp() - (-x - y).exp());
            let den = 0.5 * ((x - y).exp() + (-x - y).exp())
                + 0.5 * (1.0 + (-2.0 * y).exp())
                + 2.0 * (-y).exp();
            1.0 + 4.0 * eta * a2 * num / den
        }
    }

    /// Squeezed vacuum after a loss channel.
    pub fn qcs2_squeezed_lossy(r: f64, eta: f64) -> f64 {
        let c = (2.0 * r).cosh();
        1.0 / ((1.0 - 2.0 * eta) * (eta * c - eta) / (-eta + eta * c + 1.0) + 1.0)
    }

    /// Trend line of the damped GKP QCS²: `e^{-ε}(tanh ε + coth ε)`.
    pub fn qcs2_gkp_approx(epsilon: f64) -> f64 {
        (-epsilon).exp() * (epsilon.tanh() + 1.0 / epsilon.tanh())
    }

    /// `∂C²/∂η` at `η = 1` for the even cat.
    pub fn cat_decay_slope(alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        2.0 * a2 * (2.0 * a2 + a2.tanh())
    }

    /// Squeezed cat `(1 + D(α)) S(r)|0⟩`.
    pub fn qcs2_squeezed_cat(alpha: f64, r: f64) -> f64 {
        let a2 = alpha * alpha;
        let e4r = (4.0 * r).exp();
        let arg = 0.5 * a2 * (2.0 * r).exp();
        // (e^{4r}+1)/(e^{arg}+1) without overflow.
        let ratio = if arg > 700.0 {
            (e4r + 1.0) * (-arg).exp()
        } else {
            (e4r + 1.0) / (arg.exp() + 1.0)
        };
        0.5 * a2 * (1.0 - ratio) + (2.0 * r).cosh()
    }
}
