//! Deterministic Gaussian maps `γ → XγXᵀ + Y`, `μ → Xμ + d`, applied term by term.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix, RVector, I};
use crate::state::GaussianSumState;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    x: RMatrix,
    y: RMatrix,
    d: RVector,
}

impl GaussianChannel {
    /// Raw triple. Shapes and the symmetry of `Y` are checked; complete
    /// positivity is not, so non-physical maps can be built on purpose.
    pub fn new(x: RMatrix, y: RMatrix, d: RVector) -> Result<Self> {
        let dim = x.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || x.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "X must be a square even-sized matrix, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        for got in [y.nrows(), y.ncols(), d.len()] {
            if got != dim {
                return Err(Error::DimensionMismatch { expected: dim, got });
            }
        }
        if (&y - y.transpose()).amax() > 1e-12 * y.amax().max(1.0) {
            return Err(Error::InvalidParameter("Y must be symmetric".into()));
        }
        if x.iter()
            .chain(y.iter())
            .chain(d.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "channel entries must be finite".into(),
            ));
        }
        Ok(GaussianChannel { x, y, d })
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        GaussianChannel {
            x: RMatrix::identity(dim, dim),
            y: RMatrix::zeros(dim, dim),
            d: RVector::zeros(dim),
        }
    }

    /// Pure loss with transmissivity `eta ∈ (0, 1]` on every mode.
    pub fn loss(eta: f64, n_modes: usize) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transmissivity must lie in (0, 1], got {eta}"
            )));
        }
        let dim = 2 * n_modes;
        Ok(GaussianChannel {
            x: RMatrix::identity(dim, dim) * eta.sqrt(),
            y: RMatrix::identity(dim, dim) * ((1.0 - eta) / 2.0),
            d: RVector::zeros(dim),
        })
    }

    /// Phase-space translation by `d = (x₁, p₁, …)`.
    pub fn displacement(d: &[f64]) -> Self {
        let dim = d.len();
        GaussianChannel {
            x: RMatrix::identity(dim, dim),
            y: RMatrix::zeros(dim, dim),
            d: RVector::from_column_slice(d),
        }
    }

    /// One-mode phase rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GaussianChannel {
            x: RMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
            y: RMatrix::zeros(2, 2),
            d: RVector::zeros(2),
        }
    }

    /// One-mode squeezer `diag(e^{-r}, e^{r})`; maps vacuum to `squeezed_vacuum(r)`.
    pub fn squeezing(r: f64) -> Self {
        GaussianChannel {
            x: RMatrix::from_diagonal(&RVector::from_vec(vec![(-r).exp(), r.exp()])),
            y: RMatrix::zeros(2, 2),
            d: RVector::zeros(2),
        }
    }

    /// Embed a one-mode channel on `mode` of an `n_modes` system.
    pub fn on_mode(&self, mode: usize, n_modes: usize) -> Result<Self> {
        if self.x.nrows() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.x.nrows(),
            });
        }
        if mode >= n_modes {
            return Err(Error::InvalidParameter(format!(
                "mode {mode} out of range for {n_modes} modes"
            )));
        }
        let mut out = GaussianChannel::identity(n_modes);
        let k = 2 * mode;
        out.x.view_mut((k, k), (2, 2)).copy_from(&self.x);
        out.y.view_mut((k, k), (2, 2)).copy_from(&self.y);
        out.d.rows_mut(k, 2).copy_from(&self.d);
        Ok(out)
    }

    pub fn n_modes(&self) -> usize {
        self.x.nrows() / 2
    }

    pub fn x(&self) -> &RMatrix {
        &self.x
    }

    pub fn y(&self) -> &RMatrix {
        &self.y
    }

    pub fn d(&self) -> &RVector {
        &self.d
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &GaussianChannel) -> Result<Self> {
        if self.x.nrows() != first.x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.x.nrows(),
                got: first.x.nrows(),
            });
        }
        Ok(GaussianChannel {
            x: &self.x * &first.x,
            y: &self.x * &first.y * self.x.transpose() + &self.y,
            d: &self.x * &first.d + &self.d,
        })
    }

    /// Max-abs entry of `XΩXᵀ − Ω`.
    pub fn symplectic_residual(&self) -> f64 {
        let om = linalg::omega(self.n_modes());
        (&self.x * &om * self.x.transpose() - om).amax()
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_residual() <= 1e-12
    }

    /// Smallest eigenvalue of the Hermitian matrix `Y + (i/2)Ω − (i/2)XΩXᵀ`.
    pub fn complete_positivity_margin(&self) -> f64 {
        let om = linalg::omega(self.n_modes());
        let skew = (&om - &self.x * &om * self.x.transpose()) * 0.5;
        let h: CMatrix = linalg::to_complex(&self.y) + linalg::to_complex(&skew).map(|z| z * I);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn is_completely_positive(&self) -> bool {
        self.complete_positivity_margin() >= -1e-12
    }

    pub fn apply(&self, state: &GaussianSumState) -> Result<GaussianSumState> {
        let dim = 2 * state.n_modes();
        if self.x.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.x.nrows(),
                got: dim,
            });
        }
        let x = linalg::to_complex(&self.x);
        let xt = x.transpose();
        let y = linalg::to_complex(&self.y);
        let d = linalg::to_complex_vec(&self.d);
        Ok(state.map_terms(|t| {
            let mean = &x * t.mean() + &d;
            let cov = &x * t.cov() * &xt + &y;
            t.clone().with_moments(mean, cov)
        }))
    }
}
