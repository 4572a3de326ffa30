//! Grid quadrature on one-mode phase space, independent of the pair-sum engine.
//!
//! Every integral is a composite trapezoid rule on a uniform odd-sized grid.
//! The same pass also sums over the even-index nodes, which form the grid with
//! twice the step, and a relative change above [`CONVERGENCE_TOL`] is reported
//! as [`Error::GridTooCoarse`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{GaussianSumState, PhasePoint, WignerEvaluator};

pub const DEFAULT_POINTS: usize = 801;
pub const MIN_POINTS: usize = 64;
pub const MIN_HALF_WIDTH: f64 = 8.0;
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Absolute floor for the negativity check, which is zero for positive states.
pub const NEGATIVITY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points_per_axis: usize,
    pub center: PhasePoint,
}

impl GridSpec {
    pub fn new(half_width: f64, points_per_axis: usize, center: PhasePoint) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid half width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_POINTS} points per axis, got {points_per_axis}"
            )));
        }
        if points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid point count must be odd for the step-halving check, got {points_per_axis}"
            )));
        }
        if center.n_modes() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: center.coords().len(),
            });
        }
        Ok(GridSpec {
            half_width,
            points_per_axis,
            center,
        })
    }

    /// Square grid centred at the origin.
    pub fn centered(half_width: f64, points_per_axis: usize) -> Result<Self> {
        GridSpec::new(half_width, points_per_axis, PhasePoint::xp(0.0, 0.0))
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    /// Same extent with the step halved.
    pub fn halved(&self) -> GridSpec {
        GridSpec {
            points_per_axis: 2 * self.points_per_axis - 1,
            ..self.clone()
        }
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        self.nodes(0)
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        self.nodes(1)
    }

    fn nodes(&self, axis: usize) -> Vec<f64> {
        let c = self.center.coords()[axis];
        let h = self.step();
        (0..self.points_per_axis)
            .map(|i| c - self.half_width + i as f64 * h)
            .collect()
    }
}

/// Grid sized from the term moments: centred on the state mean, wide enough for
/// the outermost mean plus six standard deviations of the widest term.
pub fn auto_grid(state: &GaussianSumState) -> Result<GridSpec> {
    one_mode(state)?;
    let mean = state.moments()?.mean;
    let mut reach = 0.0f64;
    let mut var = 0.0f64;
    for t in state.terms() {
        if t.is_zero() {
            continue;
        }
        reach = reach.max(t.mean().iter().fold(0.0, |a, z| a.max(z.re.abs())));
        for i in 0..t.dim() {
            var = var.max(t.cov()[(i, i)].re);
        }
    }
    let half_width = (reach + 6.0 * var.sqrt()).max(MIN_HALF_WIDTH);
    GridSpec::new(half_width, DEFAULT_POINTS, PhasePoint::xp(mean[0], mean[1]))
}

fn one_mode(state: &GaussianSumState) -> Result<()> {
    if state.n_modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: state.n_modes(),
        });
    }
    Ok(())
}

/// A real function on the `(x, p)` plane with its gradient.
pub trait PhaseSpaceFunction: Sync {
    fn value(&self, x: f64, p: f64) -> f64;
    fn value_and_gradient(&self, x: f64, p: f64) -> (f64, [f64; 2]);
}

impl PhaseSpaceFunction for WignerEvaluator {
    fn value(&self, x: f64, p: f64) -> f64 {
        WignerEvaluator::value(self, &[x, p])
            .expect("evaluator built for one mode")
            .re
    }

    fn value_and_gradient(&self, x: f64, p: f64) -> (f64, [f64; 2]) {
        let (v, g) = WignerEvaluator::value_and_gradient(self, &[x, p])
            .expect("evaluator built for one mode");
        (v.re, [g[0].re, g[1].re])
    }
}

/// Wigner function of the Fock state `|k⟩` after 50% loss,
/// `W = ρ^k e^{-ρ} / (π k!)` with `ρ = x² + p²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockLossyWigner {
    k: u32,
    log_norm: f64,
}

pub fn fock_lossy_wigner(k: u32) -> FockLossyWigner {
    let log_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
    FockLossyWigner {
        k,
        log_norm: -PI.ln() - log_fact,
    }
}

impl FockLossyWigner {
    pub fn k(&self) -> u32 {
        self.k
    }
}

impl PhaseSpaceFunction for FockLossyWigner {
    fn value(&self, x: f64, p: f64) -> f64 {
        let rho = x * x + p * p;
        (self.log_norm - rho).exp() * rho.powi(self.k as i32)
    }

    fn value_and_gradient(&self, x: f64, p: f64) -> (f64, [f64; 2]) {
        let rho = x * x + p * p;
        let base = (self.log_norm - rho).exp();
        let k = self.k as i32;
        let rk = rho.powi(k);
        let drho = if k == 0 {
            -rk
        } else {
            k as f64 * rho.powi(k - 1) - rk
        };
        let d = base * drho;
        (base * rk, [2.0 * x * d, 2.0 * p * d])
    }
}

/// Gradient by central differences, used only to test analytic gradients.
pub struct FiniteDifference<F> {
    pub inner: F,
    pub step: f64,
}

impl<F: PhaseSpaceFunction> PhaseSpaceFunction for FiniteDifference<F> {
    fn value(&self, x: f64, p: f64) -> f64 {
        self.inner.value(x, p)
    }

    fn value_and_gradient(&self, x: f64, p: f64) -> (f64, [f64; 2]) {
        let h = self.step;
        let gx = (self.inner.value(x + h, p) - self.inner.value(x - h, p)) / (2.0 * h);
        let gp = (self.inner.value(x, p + h) - self.inner.value(x, p - h)) / (2.0 * h);
        (self.inner.value(x, p), [gx, gp])
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    w: f64,
    w2: f64,
    grad2: f64,
    neg: f64,
    min: f64,
}

impl Sums {
    fn add_scaled(&mut self, o: &Sums, s: f64) {
        self.w += s * o.w;
        self.w2 += s * o.w2;
        self.grad2 += s * o.grad2;
        self.neg += s * o.neg;
        self.min = self.min.min(o.min);
    }
}

/// Trapezoid weight of node `i` on a line of `n` nodes.
fn weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Fine-grid and coarse-grid (every other node) quadratures of the integrands,
/// reduced row by row in order so the result is independent of thread count.
fn integrate<F: PhaseSpaceFunction>(f: &F, grid: &GridSpec, gradient: bool) -> (Sums, Sums) {
    let xs = grid.x_nodes();
    let ps = grid.p_nodes();
    let n = grid.points_per_axis;
    let nc = n.div_ceil(2);
    let rows: Vec<(Sums, Sums)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut fine = Sums {
                min: f64::INFINITY,
                ..Sums::default()
            };
            let mut coarse = fine;
            let row_coarse = i % 2 == 0;
            for (j, &p) in ps.iter().enumerate() {
                let (w, g2) = if gradient {
                    let (w, g) = f.value_and_gradient(xs[i], p);
                    (w, g[0] * g[0] + g[1] * g[1])
                } else {
                    (f.value(xs[i], p), 0.0)
                };
                let node = Sums {
                    w,
                    w2: w * w,
                    grad2: g2,
                    neg: (w.abs() - w) / 2.0,
                    min: w,
                };
                fine.add_scaled(&node, weight(j, n));
                if row_coarse && j % 2 == 0 {
                    coarse.add_scaled(&node, weight(j / 2, nc));
                }
            }
            (fine, coarse)
        })
        .collect();
    let mut fine = Sums {
        min: f64::INFINITY,
        ..Sums::default()
    };
    let mut coarse = fine;
    for (i, (f_row, c_row)) in rows.iter().enumerate() {
        fine.add_scaled(f_row, weight(i, n));
        if i % 2 == 0 {
            coarse.add_scaled(c_row, weight(i / 2, nc));
        }
    }
    let h = grid.step();
    let area = h * h;
    let scale = |s: &mut Sums, a: f64| {
        s.w *= a;
        s.w2 *= a;
        s.grad2 *= a;
        s.neg *= a;
    };
    scale(&mut fine, area);
    scale(&mut coarse, 4.0 * area);
    (fine, coarse)
}

fn converged(quantity: &'static str, coarse: f64, fine: f64) -> Result<()> {
    if (fine - coarse).abs() > CONVERGENCE_TOL * fine.abs() || !fine.is_finite() {
        return Err(Error::GridTooCoarse {
            quantity,
            coarse,
            fine,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericQcs {
    pub qcs_squared: f64,
    pub purity: f64,
    pub grad_integral: f64,
    pub norm: f64,
}

/// `(1/2) ∫|∇W|² / ∫W²` on the grid, with the purity `2π ∫W²` alongside.
pub fn qcs_numeric<F: PhaseSpaceFunction>(f: &F, grid: &GridSpec) -> Result<NumericQcs> {
    let (fine, coarse) = integrate(f, grid, true);
    let q_fine = fine.grad2 / (2.0 * fine.w2);
    let q_coarse = coarse.grad2 / (2.0 * coarse.w2);
    converged("qcs_squared", q_coarse, q_fine)?;
    converged("purity", 2.0 * PI * coarse.w2, 2.0 * PI * fine.w2)?;
    Ok(NumericQcs {
        qcs_squared: q_fine,
        purity: 2.0 * PI * fine.w2,
        grad_integral: fine.grad2,
        norm: fine.w,
    })
}

/// Convenience wrapper for a one-mode Gaussian-sum state.
pub fn qcs_numeric_state(state: &GaussianSumState, grid: &GridSpec) -> Result<NumericQcs> {
    one_mode(state)?;
    qcs_numeric(&state.evaluator()?, grid)
}

/// `∫ (|W| − W)/2`.
pub fn negativity_volume(state: &GaussianSumState, grid: &GridSpec) -> Result<f64> {
    one_mode(state)?;
    let (fine, coarse) = integrate(&state.evaluator()?, grid, false);
    if (fine.neg - coarse.neg).abs() > CONVERGENCE_TOL * fine.neg + NEGATIVITY_FLOOR {
        return Err(Error::GridTooCoarse {
            quantity: "negativity",
            coarse: coarse.neg,
            fine: fine.neg,
        });
    }
    Ok(fine.neg)
}

/// Retry `f` on grids with the step halved each time until it stops reporting
/// [`Error::GridTooCoarse`] or the next grid would exceed `max_points` per axis.
pub fn refined<T>(
    grid: &GridSpec,
    max_points: usize,
    f: impl Fn(&GridSpec) -> Result<T>,
) -> Result<T> {
    let mut g = grid.clone();
    loop {
        match f(&g) {
            Err(Error::GridTooCoarse { .. }) if 2 * g.points_per_axis - 1 <= max_points => {
                g = g.halved();
            }
            other => return other,
        }
    }
}

/// Smallest value of `Re W` over the grid nodes.
pub fn wigner_min(state: &GaussianSumState, grid: &GridSpec) -> Result<f64> {
    one_mode(state)?;
    let ev = state.evaluator()?;
    let xs = grid.x_nodes();
    let ps = grid.p_nodes();
    Ok(xs
        .par_iter()
        .map(|&x| {
            ps.iter()
                .map(|&p| PhaseSpaceFunction::value(&ev, x, p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Row-major `(x, p, W)` samples; `section` fixes `p` and returns a 1D slice.
pub fn wigner_grid(
    state: &GaussianSumState,
    grid: &GridSpec,
    section: Option<f64>,
) -> Result<Vec<[f64; 3]>> {
    one_mode(state)?;
    let ev = state.evaluator()?;
    let xs = grid.x_nodes();
    let ps = match section {
        Some(p) => vec![p],
        None => grid.p_nodes(),
    };
    let rows: Vec<Vec<[f64; 3]>> = xs
        .par_iter()
        .map(|&x| {
            ps.iter()
                .map(|&p| [x, p, PhaseSpaceFunction::value(&ev, x, p)])
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::GaussianChannel;
    use crate::engine;
    use crate::states::{cat, vacuum};

    #[test]
    fn grid_validation() {
        assert!(GridSpec::centered(0.0, 101).is_err());
        assert!(GridSpec::centered(5.0, 63).is_err());
        assert!(GridSpec::centered(5.0, 100).is_err());
        let g = GridSpec::centered(5.0, 101).unwrap();
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert_eq!(g.x_nodes()[50], 0.0);
    }

    #[test]
    fn auto_grid_sizes() {
        let g = auto_grid(&vacuum(1)).unwrap();
        assert_eq!(g.half_width, 8.0);
        assert_eq!(g.center.coords(), &[0.0, 0.0]);
        let g = auto_grid(&cat(3.0)).unwrap();
        let expect = 2.0f64.sqrt() * 3.0 + 6.0 * 0.5f64.sqrt();
        assert!((g.half_width - expect).abs() < 1e-12);
        assert!(auto_grid(&vacuum(2)).is_err());
    }

    #[test]
    fn vacuum_quadrature() {
        let g = GridSpec::centered(8.0, 201).unwrap();
        let r = qcs_numeric_state(&vacuum(1), &g).unwrap();
        assert!((r.qcs_squared - 1.0).abs() < 1e-6);
        assert!((r.purity - 1.0).abs() < 1e-10);
        assert!((r.norm - 1.0).abs() < 1e-10);
        assert!(negativity_volume(&vacuum(1), &g).unwrap() < 1e-10);
    }

    #[test]
    fn coarse_grid_is_detected() {
        let g = GridSpec::centered(8.0, 65).unwrap();
        let r = qcs_numeric_state(&crate::states::squeezed_vacuum(2.0), &g);
        assert!(matches!(r, Err(Error::GridTooCoarse { .. })), "{r:?}");
    }

    #[test]
    fn refinement_recovers_from_coarse_grid() {
        let s = crate::states::squeezed_vacuum(1.0);
        let g = GridSpec::centered(8.0, 65).unwrap();
        assert!(qcs_numeric_state(&s, &g).is_err());
        let r = refined(&g, 2000, |g| qcs_numeric_state(&s, g)).unwrap();
        assert!((r.qcs_squared - 2.0f64.cosh()).abs() < 1e-6);
        assert!(refined(&g, 100, |g| qcs_numeric_state(&s, g)).is_err());
    }

    #[test]
    fn fock_values() {
        assert!((fock_lossy_wigner(0).value(0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(fock_lossy_wigner(1).value(0.0, 0.0), 0.0);
        let g = GridSpec::centered(10.0, 401).unwrap();
        let r = qcs_numeric(&fock_lossy_wigner(1), &g).unwrap();
        assert!((r.norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fock_gradient_matches_differences() {
        for k in 0..4 {
            let f = fock_lossy_wigner(k);
            let fd = FiniteDifference {
                inner: f,
                step: 1e-6,
            };
            for &(x, p) in &[(0.3, -0.7), (1.2, 0.4), (-2.0, 1.5)] {
                let (_, a) = f.value_and_gradient(x, p);
                let (_, b) = fd.value_and_gradient(x, p);
                assert!((a[0] - b[0]).abs() < 1e-7 && (a[1] - b[1]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn cat_minimum_is_negative_and_lossy_cat_is_positive() {
        let c = cat(2.0);
        let g = auto_grid(&c).unwrap();
        assert!(wigner_min(&c, &g).unwrap() < -0.1);
        let lossy = GaussianChannel::loss(0.5, 1).unwrap().apply(&c).unwrap();
        assert!(wigner_min(&lossy, &g).unwrap() >= -1e-9);
    }

    #[test]
    fn purity_matches_engine() {
        let c = GaussianChannel::loss(0.8, 1)
            .unwrap()
            .apply(&cat(1.2))
            .unwrap();
        let g = auto_grid(&c).unwrap();
        let r = qcs_numeric_state(&c, &g).unwrap();
        let e = engine::qcs(&c).unwrap();
        assert!((r.purity - e.purity).abs() < 1e-5 * e.purity);
        assert!((r.qcs_squared - e.qcs_squared).abs() < 1e-4 * e.qcs_squared);
    }

    #[test]
    fn section_dump() {
        let g = GridSpec::centered(8.0, 65 + 2).unwrap();
        let rows = wigner_grid(&vacuum(1), &g, Some(0.0)).unwrap();
        assert_eq!(rows.len(), 67);
        let peak = rows.iter().map(|r| r[2]).fold(f64::MIN, f64::max);
        assert!((peak - 1.0 / PI).abs() < 1e-12);
    }
}
