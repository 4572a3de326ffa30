//! Small dense helpers on top of nalgebra for the 2n x 2n matrices used by the engine.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn to_complex_vec(v: &RVector) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Max-abs entry of `m - m^T`.
pub fn symmetry_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting, kept around for the log-determinant,
/// the inverse and the 1-norm condition number.
pub struct Factored {
    pub log_det: Complex64,
    pub inverse: CMatrix,
    pub condition: f64,
}

/// Factor a square complex matrix. Returns `None` when a pivot is exactly zero.
///
/// The log-determinant is the sum of principal logs of the U diagonal plus `i*pi`
/// for an odd row permutation. It is not wrapped back into (-pi, pi], so halving
/// it gives a square-root branch that is continuous in the matrix entries.
pub fn factor(m: &CMatrix) -> Option<Factored> {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut log_det = Complex64::new(0.0, 0.0);
    for k in 0..u.nrows() {
        let pivot = u[(k, k)];
        if pivot.norm() == 0.0 {
            return None;
        }
        log_det += pivot.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        log_det += Complex64::new(0.0, PI);
    }
    let inverse = lu.try_inverse()?;
    let condition = norm1(m) * norm1(&inverse);
    Some(Factored {
        log_det,
        inverse,
        condition,
    })
}

/// Bilinear form `a^T b` (no conjugation).
pub fn bdot(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Cholesky-based positive-definiteness test for a real symmetric matrix.
pub fn is_positive_definite(m: &RMatrix) -> bool {
    m.clone().cholesky().is_some()
}

/// Block-diagonal symplectic form for `n_modes` modes.
pub fn omega(n_modes: usize) -> RMatrix {
    let mut om = RMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// Block-diagonal direct sum of two square matrices.
pub fn direct_sum<T: nalgebra::Scalar + Zero>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = DMatrix::from_element(na + nb, na + nb, T::zero());
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}
