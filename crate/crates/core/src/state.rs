//! Gaussian-sum representation of phase-space quasiprobability distributions.
//!
//! A state on `n` modes is a finite list of terms `c_m G(r; mu_m, gamma_m)` where
//! `G` is a normalized (possibly complex) Gaussian over the quadrature vector
//! `r = (x_1, p_1, ..., x_n, p_n)`. Units have hbar = 1, so the vacuum has
//! covariance `I/2`.
//!
//! Coefficients are stored as complex logarithms. GKP lattices and bred states
//! contain terms whose `|c_m|` underflows f64 while the peak of `c_m G` does not.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RMatrix, RVector};

/// Symmetry tolerance for term covariances.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Tolerance on `|sum c_m - 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Tolerance on conjugate-closure and imaginary Wigner residues.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// A real phase-space point `(x_1, p_1, ..., x_n, p_n)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "phase point needs an even, non-zero number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(PhasePoint(coords))
    }

    pub fn xp(x: f64, p: f64) -> Self {
        PhasePoint(vec![x, p])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len() / 2
    }
}

/// One summand `c G(r; mu, gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    log_coeff: Complex64,
    mean: CVector,
    cov: CMatrix,
}

impl GaussianTerm {
    pub fn new(coeff: Complex64, mean: CVector, cov: CMatrix) -> Result<Self> {
        Self::from_log_coeff(log_of(coeff), mean, cov)
    }

    pub fn from_log_coeff(log_coeff: Complex64, mean: CVector, cov: CMatrix) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "mean must have even non-zero length, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: cov.nrows().max(cov.ncols()),
            });
        }
        let asym = linalg::symmetry_residual(&cov);
        if asym > SYMMETRY_TOL * linalg::max_abs(&cov).max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "covariance is not symmetric (residual {asym:.3e})"
            )));
        }
        if log_coeff.re.is_nan() || log_coeff.im.is_nan() || log_coeff.re == f64::INFINITY {
            return Err(Error::InvalidParameter("coefficient is not finite".into()));
        }
        Ok(GaussianTerm {
            log_coeff,
            mean,
            cov,
        })
    }

    /// A physical (real) Gaussian with real weight.
    pub fn real(coeff: f64, mean: &RVector, cov: &RMatrix) -> Result<Self> {
        Self::new(
            Complex64::new(coeff, 0.0),
            linalg::to_complex_vec(mean),
            linalg::to_complex(cov),
        )
    }

    pub fn coeff(&self) -> Complex64 {
        self.log_coeff.exp()
    }

    pub fn log_coeff(&self) -> Complex64 {
        self.log_coeff
    }

    pub fn mean(&self) -> &CVector {
        &self.mean
    }

    pub fn cov(&self) -> &CMatrix {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_zero(&self) -> bool {
        self.log_coeff.re == f64::NEG_INFINITY
    }

    /// The term `(c̄, μ̄, γ̄)`.
    pub fn conjugate(&self) -> GaussianTerm {
        GaussianTerm {
            log_coeff: self.log_coeff.conj(),
            mean: self.mean.map(|z| z.conj()),
            cov: self.cov.map(|z| z.conj()),
        }
    }

    /// `ln max_r |c G(r)|` over real `r`, for real positive-definite covariances;
    /// otherwise `ln |c|`. Used to rank terms for truncation.
    pub fn peak_log_weight(&self) -> f64 {
        let dim = self.dim();
        let is_real_cov = self.cov.iter().all(|z| z.im == 0.0);
        if !is_real_cov {
            return self.log_coeff.re;
        }
        let re = self.cov.map(|z| z.re);
        let Some(chol) = re.clone().cholesky() else {
            return self.log_coeff.re;
        };
        let imag = RVector::from_iterator(dim, self.mean.iter().map(|z| z.im));
        let solved = chol.solve(&imag);
        let log_norm = -0.5 * (dim as f64 * (2.0 * PI).ln() + chol.determinant().ln());
        self.log_coeff.re + 0.5 * imag.dot(&solved) + log_norm
    }

    pub(crate) fn with_log_coeff(mut self, log_coeff: Complex64) -> Self {
        self.log_coeff = log_coeff;
        self
    }

    pub(crate) fn with_moments(mut self, mean: CVector, cov: CMatrix) -> Self {
        self.mean = mean;
        self.cov = cov;
        self
    }

    /// Distance to another term used for the conjugate-closure check: relative
    /// coefficient mismatch, then max-abs mean and covariance mismatch.
    fn distance(&self, other: &GaussianTerm) -> f64 {
        let mut coeff = if self.is_zero() && other.is_zero() {
            0.0
        } else if self.is_zero() || other.is_zero() {
            f64::INFINITY
        } else {
            ((self.log_coeff - other.log_coeff).exp() - 1.0).norm()
        };
        if coeff.is_nan() {
            coeff = f64::INFINITY;
        }
        let mean = linalg::max_abs_vec(&(&self.mean - &other.mean));
        let cov = linalg::max_abs(&(&self.cov - &other.cov));
        coeff.max(mean).max(cov)
    }
}

/// Principal complex log, with `ln 0 = -inf`.
pub(crate) fn log_of(c: Complex64) -> Complex64 {
    if c.norm() == 0.0 {
        Complex64::new(f64::NEG_INFINITY, 0.0)
    } else {
        c.ln()
    }
}

/// Log-sum-exp over complex logarithms, returning `ln sum exp(z_k)`.
pub(crate) fn log_sum_exp(logs: impl Iterator<Item = Complex64> + Clone) -> Complex64 {
    let shift = logs.clone().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    let sum: Complex64 = logs.map(|z| (z - shift).exp()).sum();
    log_of(sum) + shift
}

/// Residuals of the representation invariants.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Validation {
    /// `|sum c_m - 1|`.
    pub normalization_residual: f64,
    /// Max over terms of the distance from the conjugated term to its nearest partner.
    pub hermiticity_residual: f64,
    /// Per-term max-abs entry of `gamma - gamma^T`.
    pub symmetry_residuals: Vec<f64>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.normalization_residual <= NORMALIZATION_TOL
            && self.hermiticity_residual <= HERMITICITY_TOL
            && self.symmetry_residuals.iter().all(|&r| r <= SYMMETRY_TOL)
    }
}

/// First and second moments of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: RVector,
    pub cov: RMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSumState {
    n_modes: usize,
    terms: Vec<GaussianTerm>,
}

impl GaussianSumState {
    pub fn new(n_modes: usize, terms: Vec<GaussianTerm>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be positive".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "a state needs at least one term".into(),
            ));
        }
        for t in &terms {
            if t.dim() != 2 * n_modes {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n_modes,
                    got: t.dim(),
                });
            }
        }
        Ok(GaussianSumState { n_modes, terms })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn log_coeff_sum(&self) -> Complex64 {
        log_sum_exp(self.terms.iter().map(|t| t.log_coeff))
    }

    pub fn coeff_sum(&self) -> Complex64 {
        self.log_coeff_sum().exp()
    }

    /// Divide every coefficient by `sum c_m`. Constructors call this once.
    pub fn renormalized(self) -> Result<Self> {
        let log_sum = self.log_coeff_sum();
        if !log_sum.re.is_finite() {
            return Err(Error::InvalidParameter(
                "coefficients sum to zero; cannot normalize".into(),
            ));
        }
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let lc = t.log_coeff - log_sum;
                t.with_log_coeff(lc)
            })
            .collect();
        Ok(GaussianSumState {
            n_modes: self.n_modes,
            terms,
        })
    }

    pub(crate) fn map_terms(&self, f: impl Fn(&GaussianTerm) -> GaussianTerm) -> Self {
        GaussianSumState {
            n_modes: self.n_modes,
            terms: self.terms.iter().map(f).collect(),
        }
    }

    pub fn validate(&self) -> Validation {
        let normalization_residual = (self.coeff_sum() - 1.0).norm();
        let symmetry_residuals = self
            .terms
            .iter()
            .map(|t| linalg::symmetry_residual(&t.cov))
            .collect();
        let hermiticity_residual = self
            .terms
            .iter()
            .map(|t| {
                let conj = t.conjugate();
                let own = conj.distance(t);
                if own == 0.0 {
                    return 0.0;
                }
                self.terms
                    .iter()
                    .map(|other| conj.distance(other))
                    .fold(own, f64::min)
            })
            .fold(0.0, f64::max);
        Validation {
            normalization_residual,
            hermiticity_residual,
            symmetry_residuals,
        }
    }

    /// Product state on `n_a + n_b` modes: every pair of terms with block-diagonal
    /// covariance and concatenated means.
    pub fn tensor(&self, other: &GaussianSumState) -> GaussianSumState {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                let mean = CVector::from_iterator(
                    a.dim() + b.dim(),
                    a.mean.iter().chain(b.mean.iter()).copied(),
                );
                terms.push(GaussianTerm {
                    log_coeff: a.log_coeff + b.log_coeff,
                    mean,
                    cov: linalg::direct_sum(&a.cov, &b.cov),
                });
            }
        }
        GaussianSumState {
            n_modes: self.n_modes + other.n_modes,
            terms,
        }
    }

    pub fn evaluator(&self) -> Result<WignerEvaluator> {
        WignerEvaluator::new(self)
    }

    /// `W(r) = sum_m c_m G(r; mu_m, gamma_m)`.
    pub fn wigner(&self, point: &PhasePoint) -> Result<Complex64> {
        self.evaluator()?.value(point.coords())
    }

    /// Mean vector and covariance of the quasiprobability distribution.
    pub fn moments(&self) -> Result<Moments> {
        let dim = 2 * self.n_modes;
        let mut mean = CVector::zeros(dim);
        let mut second = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            if t.is_zero() {
                continue;
            }
            let c = t.coeff();
            mean += t.mean.map(|z| z * c);
            second += (&t.cov + &t.mean * t.mean.transpose()).map(|z| z * c);
        }
        let cov = second - &mean * mean.transpose();
        let scale = linalg::max_abs(&cov)
            .max(linalg::max_abs_vec(&mean))
            .max(1.0);
        let imag = mean
            .iter()
            .chain(cov.iter())
            .fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        if imag > HERMITICITY_TOL * scale {
            return Err(Error::HermiticityViolation { residual: imag });
        }
        let mean = mean.map(|z| z.re);
        let cov = cov.map(|z| z.re);
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Moments { mean, cov })
    }
}

struct PreparedTerm {
    log_coeff: Complex64,
    mean: Vec<Complex64>,
    inv_cov: Vec<Complex64>,
    log_norm: Complex64,
}

/// Pointwise evaluator with per-term inverses and normalizations cached.
pub struct WignerEvaluator {
    dim: usize,
    terms: Vec<PreparedTerm>,
}

impl WignerEvaluator {
    pub fn new(state: &GaussianSumState) -> Result<Self> {
        let dim = 2 * state.n_modes;
        let mut terms = Vec::with_capacity(state.len());
        for (idx, t) in state.terms.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let f = linalg::factor(&t.cov).ok_or(Error::SingularCovariance { term: idx })?;
            if f.condition > 1e14 {
                return Err(Error::SingularCovariance { term: idx });
            }
            let log_norm = -0.5 * (f.log_det + dim as f64 * (2.0 * PI).ln());
            terms.push(PreparedTerm {
                log_coeff: t.log_coeff,
                mean: t.mean.iter().copied().collect(),
                inv_cov: f.inverse.transpose().iter().copied().collect(),
                log_norm,
            });
        }
        Ok(WignerEvaluator { dim, terms })
    }

    fn check(&self, r: &[f64]) -> Result<()> {
        if r.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: r.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, r: &[f64]) -> Result<Complex64> {
        self.check(r)?;
        Ok(self.eval(r, None))
    }

    /// Value and gradient `sum_m -c_m gamma_m^{-1} (r - mu_m) G_m(r)`.
    pub fn value_and_gradient(&self, r: &[f64]) -> Result<(Complex64, Vec<Complex64>)> {
        self.check(r)?;
        let mut grad = vec![Complex64::new(0.0, 0.0); self.dim];
        let v = self.eval(r, Some(&mut grad));
        Ok((v, grad))
    }

    fn eval(&self, r: &[f64], mut grad: Option<&mut [Complex64]>) -> Complex64 {
        let dim = self.dim;
        let mut total = Complex64::new(0.0, 0.0);
        let mut diff = vec![Complex64::new(0.0, 0.0); dim];
        let mut solved = vec![Complex64::new(0.0, 0.0); dim];
        for t in &self.terms {
            for i in 0..dim {
                diff[i] = r[i] - t.mean[i];
            }
            let mut quad = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                let row = &t.inv_cov[i * dim..(i + 1) * dim];
                let s: Complex64 = row.iter().zip(&diff).map(|(a, b)| a * b).sum();
                solved[i] = s;
                quad += diff[i] * s;
            }
            let g = (t.log_coeff + t.log_norm - 0.5 * quad).exp();
            total += g;
            if let Some(grad) = grad.as_deref_mut() {
                for i in 0..dim {
                    grad[i] -= solved[i] * g;
                }
            }
        }
        total
    }
}
