//! Closed-form purity and quadrature coherence scale of Gaussian-sum states.
//!
//! Both integrals reduce to double sums over term pairs `(m, n)` with the common
//! kernel
//!
//! ```text
//! K_mn = c_m c̄_n exp(A_mn) / sqrt(det(γ_m + γ̄_n))
//! ```
//!
//! so that `Tr ρ² = Σ K_mn` and `(2π)^n ∫|∇W|² = Σ K_mn (Tr S⁻¹ + q_mn)`. The
//! QCS² is the ratio divided by `2n`; every power of `2π` cancels.
//!
//! Pair contributions are accumulated as logarithms with a running
//! max-real-part shift. Only `m <= n` is visited: the `(n, m)` contribution is
//! the complex conjugate of `(m, n)`, so off-diagonal pairs add `2 Re K_mn`.
//!
//! Rows `m` are evaluated in parallel and reduced sequentially in row order, so
//! the result is bit-for-bit independent of the thread count.

use rayon::prelude::*;
use serde::Serialize;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RMatrix};
use crate::state::{GaussianSumState, GaussianTerm, NORMALIZATION_TOL};

/// Pair sums above this 1-norm condition number are rejected.
pub const PAIR_CONDITION_LIMIT: f64 = 1e14;
/// Distance of `|Im ln det S|` from `π` that triggers a branch warning.
pub const BRANCH_MARGIN: f64 = 0.1;

/// Per-pair quantities of the Gaussian product `G_m Ḡ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDatum {
    /// `S = γ_m + γ̄_n`.
    pub gamma_sum: CMatrix,
    /// `Γ` with `Γ⁻¹ = γ_m⁻¹ + γ̄_n⁻¹`, computed as `γ_m S⁻¹ γ̄_n`.
    pub gamma_prod: CMatrix,
    /// Mean of the product Gaussian.
    pub d: CVector,
    /// Exponent of the product prefactor.
    pub a: Complex64,
    /// `ln det S` on the continuous branch described in [`crate::linalg::factor`].
    pub log_det_sum: Complex64,
    /// `ln c_m + ln c̄_n + A - ½ ln det S`.
    pub log_kernel: Complex64,
    /// `Tr S⁻¹ + (d - μ̄_n)ᵀ γ̄_n⁻¹ γ_m⁻¹ (d - μ_m)`.
    pub grad_weight: Complex64,
}

/// What the hot loop needs from a pair.
#[derive(Debug, Clone, Copy)]
struct PairKernel {
    log_kernel: Complex64,
    grad_weight: Complex64,
    a: Complex64,
    log_det_phase: f64,
}

fn singular(condition: f64) -> Error {
    Error::SingularPairSum {
        m: 0,
        n: 0,
        condition,
    }
}

/// Shared algebra: `S`, its factorization, `Δ = μ_m - μ̄_n` and `S⁻¹Δ`.
///
/// Uses `A = -½ ΔᵀS⁻¹Δ` and `γ_m⁻¹(d - μ_m) = -S⁻¹Δ`,
/// `γ̄_n⁻¹(d - μ̄_n) = S⁻¹Δ`, so no per-term inverse is needed.
fn pair_core(tm: &GaussianTerm, tn: &GaussianTerm) -> Result<(CMatrix, linalg::Factored, CVector)> {
    let s = tm.cov() + tn.cov().map(|z| z.conj());
    let f = linalg::factor(&s).ok_or_else(|| singular(f64::INFINITY))?;
    if f.condition.is_nan() || f.condition > PAIR_CONDITION_LIMIT {
        return Err(singular(f.condition));
    }
    let delta = tm.mean() - tn.mean().map(|z| z.conj());
    Ok((s, f, delta))
}

fn kernel(tm: &GaussianTerm, tn: &GaussianTerm) -> Result<PairKernel> {
    let (_, f, delta) = pair_core(tm, tn)?;
    let v = &f.inverse * &delta;
    let a = -0.5 * linalg::bdot(&delta, &v);
    let grad_weight = linalg::trace(&f.inverse) - linalg::bdot(&v, &v);
    let log_kernel = tm.log_coeff() + tn.log_coeff().conj() + a - 0.5 * f.log_det;
    Ok(PairKernel {
        log_kernel,
        grad_weight,
        a,
        log_det_phase: f.log_det.im,
    })
}

/// Full overlap datum for one ordered pair.
pub fn pairwise_overlap(term_m: &GaussianTerm, term_n: &GaussianTerm) -> Result<OverlapDatum> {
    if term_m.dim() != term_n.dim() {
        return Err(Error::DimensionMismatch {
            expected: term_m.dim(),
            got: term_n.dim(),
        });
    }
    let (s, f, delta) = pair_core(term_m, term_n)?;
    let gm = term_m.cov();
    let gn_bar = term_n.cov().map(|z| z.conj());
    let mu_m = term_m.mean();
    let mu_n_bar = term_n.mean().map(|z| z.conj());
    let gamma_prod = gm * &f.inverse * &gn_bar;
    let d = &gn_bar * (&f.inverse * mu_m) + gm * (&f.inverse * &mu_n_bar);
    let v = &f.inverse * &delta;
    let a = -0.5 * linalg::bdot(&delta, &v);
    let grad_weight = linalg::trace(&f.inverse) - linalg::bdot(&v, &v);
    let log_kernel = term_m.log_coeff() + term_n.log_coeff().conj() + a - 0.5 * f.log_det;
    Ok(OverlapDatum {
        gamma_sum: s,
        gamma_prod,
        d,
        a,
        log_det_sum: f.log_det,
        log_kernel,
        grad_weight,
    })
}

/// Non-fatal findings of a pair-sum evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// `ln det(γ_m + γ̄_n)` has imaginary part within [`BRANCH_MARGIN`] of `±π`.
    BranchWarning { m: usize, n: usize, phase: f64 },
    /// Purity outside `(0, 1 + 1e-8]`. Reported, never clamped.
    PurityOutOfRange { value: f64 },
}

/// Running log-shifted sums.
#[derive(Debug, Clone, Copy)]
struct Accum {
    shift: f64,
    purity: Complex64,
    grad: Complex64,
    max_abs_a: f64,
}

impl Accum {
    fn empty() -> Self {
        Accum {
            shift: f64::NEG_INFINITY,
            purity: Complex64::new(0.0, 0.0),
            grad: Complex64::new(0.0, 0.0),
            max_abs_a: 0.0,
        }
    }

    fn rescale(&mut self, shift: f64) {
        if shift > self.shift {
            if self.shift != f64::NEG_INFINITY {
                let f = (self.shift - shift).exp();
                self.purity *= f;
                self.grad *= f;
            }
            self.shift = shift;
        }
    }

    fn add(&mut self, k: &PairKernel, weight: f64, real_only: bool) {
        self.max_abs_a = self.max_abs_a.max(k.a.norm());
        if k.log_kernel.re == f64::NEG_INFINITY {
            return;
        }
        self.rescale(k.log_kernel.re);
        let mut term = (k.log_kernel - self.shift).exp();
        if real_only {
            term = Complex64::new(term.re, 0.0);
        }
        let mut g = (k.log_kernel - self.shift).exp() * k.grad_weight;
        if real_only {
            g = Complex64::new(g.re, 0.0);
        }
        self.purity += term * weight;
        self.grad += g * weight;
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.max_abs_a = self.max_abs_a.max(other.max_abs_a);
        if other.shift == f64::NEG_INFINITY {
            return self;
        }
        self.rescale(other.shift);
        let f = (other.shift - self.shift).exp();
        self.purity += other.purity * f;
        self.grad += other.grad * f;
        self
    }
}

/// How the `(m, n)` index set is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// `m <= n`, off-diagonal pairs counted as `2 Re K_mn`.
    Triangular,
    /// Every ordered pair, summed as complex numbers.
    Full,
}

/// Unscaled pair sums `Σ K_mn` and `Σ K_mn w_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSums {
    pub purity_kernel: Complex64,
    pub grad_kernel: Complex64,
    pub max_abs_a: f64,
    pub diagnostics: Vec<Diagnostic>,
}

struct RowResult {
    accum: Accum,
    warnings: Vec<Diagnostic>,
}

/// Evaluate both double sums.
pub fn pair_sums(state: &GaussianSumState, summation: Summation) -> Result<PairSums> {
    let terms: Vec<(usize, &GaussianTerm)> = state
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_zero())
        .collect();
    let count = terms.len();

    let rows: Vec<Result<RowResult>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (m, tm) = terms[i];
            let mut accum = Accum::empty();
            let mut warnings = Vec::new();
            let start = match summation {
                Summation::Triangular => i,
                Summation::Full => 0,
            };
            for &(n, tn) in &terms[start..] {
                let k = kernel(tm, tn).map_err(|e| match e {
                    Error::SingularPairSum { condition, .. } => {
                        Error::SingularPairSum { m, n, condition }
                    }
                    other => other,
                })?;
                if (k.log_det_phase.abs() - std::f64::consts::PI).abs() < BRANCH_MARGIN {
                    warnings.push(Diagnostic::BranchWarning {
                        m,
                        n,
                        phase: k.log_det_phase,
                    });
                }
                match summation {
                    Summation::Triangular => {
                        let w = if n == m { 1.0 } else { 2.0 };
                        accum.add(&k, w, true);
                    }
                    Summation::Full => accum.add(&k, 1.0, false),
                }
            }
            Ok(RowResult { accum, warnings })
        })
        .collect();

    let mut total = Accum::empty();
    let mut diagnostics = Vec::new();
    for row in rows {
        let row = row?;
        total = total.merge(row.accum);
        diagnostics.extend(row.warnings);
    }
    let scale = if total.shift == f64::NEG_INFINITY {
        0.0
    } else {
        total.shift.exp()
    };
    Ok(PairSums {
        purity_kernel: total.purity * scale,
        grad_kernel: total.grad * scale,
        max_abs_a: total.max_abs_a,
        diagnostics,
    })
}

/// Result of a closed-form QCS evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcsReport {
    /// `Tr ρ²`.
    pub purity: f64,
    /// `Σ K_mn (Tr S⁻¹ + q_mn)`, i.e. `(2π)^n ∫|∇W|²`.
    pub grad_overlap: f64,
    pub qcs_squared: f64,
    /// Conjugate-closure residual of the input state.
    pub hermiticity_residual: f64,
    pub normalization_residual: f64,
    pub n_terms: usize,
    pub max_abs_a: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// `Tr ρ²` from the closed-form double sum.
pub fn purity(state: &GaussianSumState) -> Result<f64> {
    Ok(pair_sums(state, Summation::Triangular)?.purity_kernel.re)
}

/// `(2π)^n ∫|∇W|²` from the closed-form double sum.
pub fn grad_overlap(state: &GaussianSumState) -> Result<f64> {
    Ok(pair_sums(state, Summation::Triangular)?.grad_kernel.re)
}

/// QCS² `= Σ K_mn w_mn / (2n Σ K_mn)` with diagnostics.
pub fn qcs(state: &GaussianSumState) -> Result<QcsReport> {
    let sums = pair_sums(state, Summation::Triangular)?;
    let validation = state.validate();
    let purity = sums.purity_kernel.re;
    let grad = sums.grad_kernel.re;
    let mut diagnostics = sums.diagnostics;
    if !(purity > 0.0 && purity <= 1.0 + NORMALIZATION_TOL) {
        diagnostics.push(Diagnostic::PurityOutOfRange { value: purity });
    }
    Ok(QcsReport {
        purity,
        grad_overlap: grad,
        qcs_squared: grad / (2.0 * state.n_modes() as f64 * purity),
        hermiticity_residual: validation.hermiticity_residual,
        normalization_residual: validation.normalization_residual,
        n_terms: state.len(),
        max_abs_a: sums.max_abs_a,
        diagnostics,
    })
}

fn check_square(cov: &RMatrix, n_modes: usize) -> Result<()> {
    if cov.nrows() != 2 * n_modes || cov.ncols() != 2 * n_modes {
        return Err(Error::DimensionMismatch {
            expected: 2 * n_modes,
            got: cov.nrows().max(cov.ncols()),
        });
    }
    Ok(())
}

/// Pure-state QCS² `(1/n) Tr γ`.
pub fn qcs_pure_from_covariance(cov: &RMatrix, n_modes: usize) -> Result<f64> {
    check_square(cov, n_modes)?;
    Ok(cov.trace() / n_modes as f64)
}

/// Gaussian-state QCS² `(1/4n) Tr γ⁻¹`.
pub fn qcs_gaussian(cov: &RMatrix, n_modes: usize) -> Result<f64> {
    check_square(cov, n_modes)?;
    let chol = cov.clone().cholesky().ok_or(Error::NonPositiveDefinite)?;
    Ok(chol.inverse().trace() / (4.0 * n_modes as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{to_complex, RVector};
    use crate::states;

    fn displaced_vacuum(s: f64) -> GaussianTerm {
        GaussianTerm::real(
            1.0,
            &RVector::from_vec(vec![s, 0.0]),
            &(RMatrix::identity(2, 2) * 0.5),
        )
        .unwrap()
    }

    #[test]
    fn identical_vacuum_terms() {
        let t = displaced_vacuum(0.0);
        let o = pairwise_overlap(&t, &t).unwrap();
        assert!(
            (o.gamma_prod.clone() - to_complex(&(RMatrix::identity(2, 2) * 0.25)))
                .iter()
                .all(|z| z.norm() < 1e-15)
        );
        assert!(o.d.iter().all(|z| z.norm() == 0.0));
        assert_eq!(o.a, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn opposite_displacements() {
        // ½(μ_m+μ̄_n)ᵀ(μ_m+μ̄_n) - μ_mᵀμ_m - μ̄_nᵀμ̄_n at γ = I/2 gives -2s².
        let s = 1.3;
        let o = pairwise_overlap(&displaced_vacuum(s), &displaced_vacuum(-s)).unwrap();
        assert!(o.d.iter().all(|z| z.norm() < 1e-15));
        assert!((o.a - Complex64::new(-2.0 * s * s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn self_overlap_of_displaced_term() {
        let t = displaced_vacuum(0.7);
        let o = pairwise_overlap(&t, &t).unwrap();
        assert!((o.d[0] - 0.7).norm() < 1e-15 && o.d[1].norm() < 1e-15);
        assert_eq!(o.a, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn singular_pair_sum_reports_indices() {
        let zero = GaussianTerm::real(0.5, &RVector::zeros(2), &RMatrix::zeros(2, 2)).unwrap();
        let s = GaussianSumState::new(1, vec![displaced_vacuum(0.0), zero]).unwrap();
        match purity(&s) {
            Err(Error::SingularPairSum { m: 1, n: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vacuum_report() {
        let r = qcs(&states::vacuum(1)).unwrap();
        assert_eq!(r.purity, 1.0);
        assert_eq!(r.grad_overlap, 2.0);
        assert_eq!(r.qcs_squared, 1.0);
        assert!(r.diagnostics.is_empty());
    }

    #[test]
    fn coherent_state_is_displacement_invariant() {
        let r = qcs(&states::coherent(Complex64::new(3.0, 0.0))).unwrap();
        assert!((r.qcs_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_helpers() {
        let half = RMatrix::identity(2, 2) * 0.5;
        assert_eq!(qcs_pure_from_covariance(&half, 1).unwrap(), 1.0);
        assert!((qcs_gaussian(&half, 1).unwrap() - 1.0).abs() < 1e-15);
        let r = 0.8f64;
        let sq = RMatrix::from_diagonal(&RVector::from_vec(vec![
            (-2.0 * r).exp() / 2.0,
            (2.0 * r).exp() / 2.0,
        ]));
        assert!((qcs_pure_from_covariance(&sq, 1).unwrap() - (2.0 * r).cosh()).abs() < 1e-14);
        // thermal with γ = I is classical.
        assert!((qcs_gaussian(&RMatrix::identity(2, 2), 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            qcs_gaussian(&RMatrix::from_diagonal_element(2, 2, -1.0), 1),
            Err(Error::NonPositiveDefinite)
        );
        assert!(matches!(
            qcs_pure_from_covariance(&half, 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lossy_squeezed_at_half_is_one() {
        for r in [0.5, 1.1, 1.7] {
            let sq = (-2.0f64 * r).exp();
            let cov = RMatrix::from_diagonal(&RVector::from_vec(vec![
                0.5 * sq / 2.0 + 0.25,
                0.5 / sq / 2.0 + 0.25,
            ]));
            assert!((qcs_gaussian(&cov, 1).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
