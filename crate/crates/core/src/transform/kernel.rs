//! The kernel density `K(xi, x) = sum_n e_n psi_n(xi) psi_n(x)` of the
//! transform, with `e_n` the eigen-phases, and its normalized form
//! `B(xi, x) = K(xi, x) / K(0+, x)`.
//!
//! The sum converges only weakly, so it is damped by `e^{-eps |lambda_n|}`.
//! [`KernelMode::Extrapolated`] evaluates several damping levels and
//! extrapolates polynomially to `eps = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::TransformOperator;
use crate::par::{self, Execution};
use crate::error::Result;
use crate::params::{Geometry, Params};

pub const DEFAULT_EPS: f64 = 1e-3;
/// Damping levels used by the extrapolated mode.
pub const EXTRAPOLATION_EPS: [f64; 7] = [0.06, 0.10, 0.14, 0.18, 0.22, 0.26, 0.30];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMode {
    Abel { eps: f64 },
    Extrapolated,
}

impl Default for KernelMode {
    fn default() -> Self {
        KernelMode::Abel { eps: DEFAULT_EPS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// Mass of the highest quarter of the series, a truncation indicator.
    pub truncation: f64,
}

/// Lagrange weights for extrapolating values at `nodes` to 0.
fn lagrange_at_zero(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &ej)| -ej / (nodes[i] - ej))
                .product()
        })
        .collect()
}

/// Per-eigenfunction coefficients of the damped (or extrapolated) series.
fn series_coeffs(t: &TransformOperator, mode: KernelMode) -> Vec<Complex64> {
    let lambdas = t.basis().eigvals();
    let damping: Vec<f64> = match mode {
        KernelMode::Abel { eps } => lambdas.iter().map(|l| (-eps * l.abs()).exp()).collect(),
        KernelMode::Extrapolated => {
            let w = lagrange_at_zero(&EXTRAPOLATION_EPS);
            lambdas
                .iter()
                .map(|l| {
                    EXTRAPOLATION_EPS
                        .iter()
                        .zip(&w)
                        .map(|(e, wi)| wi * (-e * l.abs()).exp())
                        .sum()
                })
                .collect()
        }
    };
    t.eigen_phases().iter().zip(damping).map(|(p, d)| p * d).collect()
}

/// Smallest positive quadrature node, the stand-in for `xi = 0`.
pub fn origin_node(t: &TransformOperator) -> f64 {
    t.rule()
        .nodes()
        .iter()
        .copied()
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min)
}

fn sum_series(coeffs: &[Complex64], a: &DVector<f64>, b: &DVector<f64>) -> KernelValue {
    let n = coeffs.len();
    let tail_start = n - n / 4;
    let mut value = Complex64::new(0.0, 0.0);
    let mut truncation = 0.0;
    for i in 0..n {
        let term = coeffs[i] * (a[i] * b[i]);
        value += term;
        if i >= tail_start {
            truncation += term.norm();
        }
    }
    KernelValue { value, truncation }
}

/// Unnormalized kernel density `K(xi, x)`.
pub fn kernel_eval(t: &TransformOperator, xi: f64, x: f64, mode: KernelMode) -> KernelValue {
    let coeffs = series_coeffs(t, mode);
    let a = t.basis().eigenfunctions_at(xi);
    let b = t.basis().eigenfunctions_at(x);
    sum_series(&coeffs, &a, &b)
}

/// `K(xi, x) / K(0+, x)`.
pub fn kernel_normalized(t: &TransformOperator, xi: f64, x: f64, mode: KernelMode) -> Complex64 {
    let coeffs = series_coeffs(t, mode);
    let b = t.basis().eigenfunctions_at(x);
    let num = sum_series(&coeffs, &t.basis().eigenfunctions_at(xi), &b).value;
    let den = sum_series(&coeffs, &t.basis().eigenfunctions_at(origin_node(t)), &b).value;
    num / den
}

/// Normalized kernel on `xis x xs`.
pub fn kernel_grid(t: &TransformOperator, xis: &[f64], xs: &[f64], mode: KernelMode, exec: Execution) -> DMatrix<Complex64> {
    let coeffs = series_coeffs(t, mode);
    let basis = t.basis();
    let psi_x: Vec<DVector<f64>> = par::map(exec, xs, |&x| basis.eigenfunctions_at(x));
    let psi0 = basis.eigenfunctions_at(origin_node(t));
    let dens: Vec<Complex64> = psi_x.iter().map(|b| sum_series(&coeffs, &psi0, b).value).collect();
    let rows: Vec<Vec<Complex64>> = par::map(exec, xis, |&xi| {
        let a = basis.eigenfunctions_at(xi);
        psi_x
            .iter()
            .zip(&dens)
            .map(|(b, d)| sum_series(&coeffs, &a, b).value / d)
            .collect()
    });
    DMatrix::from_fn(xis.len(), xs.len(), |i, j| rows[i][j])
}

/// `max |B(xi, x)|` over a uniform grid of `n_grid` points per axis on
/// `[-extent, extent]` (line) or `[0, extent]` (radial).
pub fn kernel_sup_estimate(t: &TransformOperator, extent: f64, n_grid: usize, mode: KernelMode, exec: Execution) -> f64 {
    let n_grid = n_grid.max(2);
    let lo = match t.params().geometry {
        Geometry::Line => -extent,
        Geometry::Radial => 0.0,
    };
    let step = (extent - lo) / (n_grid - 1) as f64;
    let pts: Vec<f64> = (0..n_grid).map(|i| lo + step * i as f64).collect();
    kernel_grid(t, &pts, &pts, mode, exec)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Basis size used for the kernel bound estimate; smaller bases overshoot.
pub const KERNEL_BOUND_BASIS: usize = 128;
const KERNEL_BOUND_EXTENT: f64 = 2.0;
const KERNEL_BOUND_GRID: usize = 41;

/// `M_hat` for `params`, from the extrapolated kernel on a
/// [`KERNEL_BOUND_BASIS`]-function operator.
pub fn kernel_bound_estimate(params: &Params, exec: Execution) -> Result<f64> {
    let t = TransformOperator::with_default_nodes(params, KERNEL_BOUND_BASIS)?;
    Ok(kernel_sup_estimate(&t, KERNEL_BOUND_EXTENT, KERNEL_BOUND_GRID, KernelMode::Extrapolated, exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    #[test]
    fn lagrange_weights_reproduce_polynomials() {
        let w = lagrange_at_zero(&EXTRAPOLATION_EPS);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let cubic: f64 = EXTRAPOLATION_EPS.iter().zip(&w).map(|(e, wi)| wi * (2.0 + e * e * e)).sum();
        assert!((cubic - 2.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_and_normalized() {
        let t = TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), 32).unwrap();
        let m = KernelMode::default();
        let a = kernel_eval(&t, 0.7, -1.3, m).value;
        let b = kernel_eval(&t, -1.3, 0.7, m).value;
        assert_eq!(a, b);
        let z = origin_node(&t);
        assert!((kernel_normalized(&t, z, 1.1, m) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn classical_kernel() {
        let t = TransformOperator::with_default_nodes(&Params::new(1, 0.0, 2.0).unwrap(), 64).unwrap();
        let xs: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
        let g = kernel_grid(&t, &xs, &xs, KernelMode::Extrapolated, Execution::Parallel);
        let mut err: f64 = 0.0;
        for (i, xi) in xs.iter().enumerate() {
            for (j, x) in xs.iter().enumerate() {
                err = err.max((g[(i, j)] - Complex64::from_polar(1.0, -xi * x)).norm());
            }
        }
        assert!(err < 5e-3, "{err}");
        let m = kernel_sup_estimate(&t, 2.0, 21, KernelMode::Extrapolated, Execution::Sequential);
        assert!((m - 1.0).abs() < 1e-2);
    }
}
