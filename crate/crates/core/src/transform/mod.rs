//! The unitary transform `F_{k,a} = e^{i pi D/(2a)} exp(i pi Delta_{k,a}/(2a))`
//! by spectral calculus on a [`SpectralBasis`].

mod basis;
mod kernel;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use basis::{build_basis, laguerre_functions, Block, SpectralBasis, GRAM_TOL, RAW_GRAM_TOL};
pub use kernel::{
    kernel_bound_estimate, kernel_eval, kernel_grid, kernel_normalized, kernel_sup_estimate, origin_node, KernelMode,
    KernelValue, DEFAULT_EPS, EXTRAPOLATION_EPS, KERNEL_BOUND_BASIS,
};

use crate::error::{Error, Result};
use crate::measure::{lp_norm_values, GridFunction, QuadratureRule};
use crate::params::Params;

/// Relative L2 projection residual above which grid inputs are rejected.
pub const PROJECTION_TOL: f64 = 1e-4;

pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone)]
pub struct TransformOperator {
    params: Params,
    basis: Arc<SpectralBasis>,
    phase: Complex64,
    /// `phase * e^{i pi lambda_n / (2a)}` per eigenvector.
    eigen_phases: Vec<Complex64>,
    u: DMatrix<Complex64>,
}

/// Grid samples together with the relative residual of their basis projection.
#[derive(Debug, Clone)]
pub struct Projected {
    pub coeffs: CVector,
    pub residual: f64,
}

pub fn build_transform(basis: Arc<SpectralBasis>) -> TransformOperator {
    let params = *basis.params();
    let a = params.a;
    let phase = Complex64::from_polar(1.0, PI * params.homogeneous_dim() / (2.0 * a));
    let eigen_phases: Vec<Complex64> = basis
        .eigvals()
        .iter()
        .map(|&l| phase * Complex64::from_polar(1.0, PI * l / (2.0 * a)))
        .collect();
    let v = basis.eigvecs().map(|x| Complex64::new(x, 0.0));
    let diag = DMatrix::from_diagonal(&DVector::from_vec(eigen_phases.clone()));
    let u = &v * diag * v.transpose();
    TransformOperator {
        params,
        basis,
        phase,
        eigen_phases,
        u,
    }
}

impl TransformOperator {
    /// Builds quadrature, basis and transform in one step.
    pub fn new(params: &Params, n_basis: usize, n_nodes: usize) -> Result<Self> {
        let rule = Arc::new(crate::measure::build_quadrature(params, n_nodes, f64::INFINITY)?);
        let basis = build_basis(params, n_basis, rule)?;
        Ok(build_transform(Arc::new(basis)))
    }

    /// Quadrature size used by [`TransformOperator::with_default_nodes`].
    pub fn default_nodes(params: &Params, n_basis: usize) -> usize {
        let half = (6 * n_basis).max(256);
        match params.geometry {
            crate::params::Geometry::Line => 2 * half,
            crate::params::Geometry::Radial => half,
        }
    }

    pub fn with_default_nodes(params: &Params, n_basis: usize) -> Result<Self> {
        Self::new(params, n_basis, Self::default_nodes(params, n_basis))
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        self.basis.rule_arc()
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    pub fn eigen_phases(&self) -> &[Complex64] {
        &self.eigen_phases
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `max |U U* - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.len();
        let prod = &self.u * self.u.adjoint();
        (prod - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn forward_coeffs(&self, c: &CVector) -> Result<CVector> {
        self.check_len(c.len())?;
        Ok(&self.u * c)
    }

    pub fn inverse_coeffs(&self, c: &CVector) -> Result<CVector> {
        self.check_len(c.len())?;
        Ok(self.u.adjoint() * c)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// Orthogonal projection of grid samples onto the basis span.
    pub fn project(&self, values: &[Complex64]) -> Result<Projected> {
        let rule = self.rule();
        if values.len() != rule.len() {
            return Err(Error::ShapeMismatch {
                expected: rule.len(),
                got: values.len(),
            });
        }
        let re: Vec<f64> = values.iter().map(|z| z.re).collect();
        let im: Vec<f64> = values.iter().map(|z| z.im).collect();
        let cr = self.basis.project_real(&re)?;
        let ci = self.basis.project_real(&im)?;
        let coeffs = CVector::from_iterator(cr.len(), cr.iter().zip(ci.iter()).map(|(r, i)| Complex64::new(*r, *i)));
        let norm = lp_norm_values(rule, values, 2.0)?;
        let residual = if norm == 0.0 {
            0.0
        } else {
            let back = self.synthesize(&coeffs);
            let diff: Vec<Complex64> = values.iter().zip(&back).map(|(a, b)| a - b).collect();
            lp_norm_values(rule, &diff, 2.0)? / norm
        };
        Ok(Projected { coeffs, residual })
    }

    /// Projection that fails when the residual exceeds [`PROJECTION_TOL`].
    pub fn project_strict(&self, values: &[Complex64]) -> Result<CVector> {
        let p = self.project(values)?;
        if p.residual > PROJECTION_TOL {
            return Err(Error::ProjectionResidualTooLarge {
                residual: p.residual,
                limit: PROJECTION_TOL,
            });
        }
        Ok(p.coeffs)
    }

    /// Samples of `sum_n c_n phi_n` on the quadrature nodes.
    pub fn synthesize(&self, c: &CVector) -> Vec<Complex64> {
        let f = self.basis.funcs();
        let re = f.tr_mul(&DVector::from_iterator(c.len(), c.iter().map(|z| z.re)));
        let im = f.tr_mul(&DVector::from_iterator(c.len(), c.iter().map(|z| z.im)));
        re.iter().zip(im.iter()).map(|(r, i)| Complex64::new(*r, *i)).collect()
    }

    pub fn synthesize_grid(&self, c: &CVector) -> GridFunction {
        GridFunction::new(self.rule().clone(), self.synthesize(c)).expect("synthesis matches rule length")
    }

    /// `F f` for grid samples; rejects inputs outside the resolvable span.
    pub fn forward(&self, f: &GridFunction) -> Result<GridFunction> {
        let c = self.project_strict(f.values())?;
        Ok(self.synthesize_grid(&self.forward_coeffs(&c)?))
    }

    pub fn inverse(&self, f: &GridFunction) -> Result<GridFunction> {
        let c = self.project_strict(f.values())?;
        Ok(self.synthesize_grid(&self.inverse_coeffs(&c)?))
    }

    /// Coefficients of `exp(-|x|^a / a)`.
    pub fn ground_state_coeffs(&self) -> Result<CVector> {
        let a = self.params.a;
        let g: Vec<Complex64> = self
            .rule()
            .nodes()
            .iter()
            .map(|x| Complex64::new((-x.abs().powf(a) / a).exp(), 0.0))
            .collect();
        self.project_strict(&g)
    }
}
