//! Orthonormal basis of `L^2(mu_{k,a})` adapted to the oscillator.
//!
//! With `u = (2/a)|x|^a` the even functions `p_j^{(alpha)}(u) e^{-u/2}` and the
//! odd functions `x p_j^{(alpha')}(u) e^{-u/2}` (orthonormal generalized
//! Laguerre polynomials, `alpha = D/a - 1`, `alpha' = (D+2)/a - 1`) span the
//! same space as `x^m |x|^{a j} e^{-|x|^a/a}` and are mapped into that space by
//! `Delta_{k,a}`. The oscillator image is computed in the `u` variable, where
//! it has no singularity at the origin:
//!
//! even `f = G(u)`:   `Delta f = 2a u G'' + 2D G' - (a/2) u G`
//! odd  `f = x H(u)`: `Delta f = x (2a u H'' + 2(D+2) H' - (a/2) u H)`

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::dunkl::{assemble_operator_matrix, Parity};
use crate::error::{Error, Result};
use crate::measure::QuadratureRule;
use crate::params::{Geometry, Params};

/// Largest tolerated Gram deviation after correction.
pub const GRAM_TOL: f64 = 1e-8;
/// Largest Gram deviation of the analytic basis before the correction step;
/// anything larger means the quadrature cannot resolve the basis.
pub const RAW_GRAM_TOL: f64 = 1e-6;
const EIGEN_TOL: f64 = 1e-6;

/// `q_j = p_j^{(alpha)}(u) e^{-u/2}` for `j < count`.
pub fn laguerre_functions(alpha: f64, count: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let q0 = (-0.5 * ln_gamma(alpha + 1.0) - 0.5 * u).exp();
    out.push(q0);
    if count == 1 {
        return out;
    }
    out.push((u - alpha - 1.0) * q0 / (alpha + 1.0).sqrt());
    for j in 1..count - 1 {
        let jf = j as f64;
        let next = ((u - (2.0 * jf + alpha + 1.0)) * out[j] - (jf * (jf + alpha)).sqrt() * out[j - 1])
            / ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
        out.push(next);
    }
    out
}

/// One parity block: the analytic family and its Gram correction.
#[derive(Debug, Clone)]
pub struct Block {
    pub parity: Parity,
    /// Laguerre parameter of the block.
    pub alpha: f64,
    /// `D` for the even block, `D + 2` for the odd one.
    pub dim: f64,
    /// Normalization constant of the analytic family.
    pub norm: f64,
    /// Basis indices of the block members, in order of `j`.
    pub indices: Vec<usize>,
    /// Lower-triangular `L^{-1}` with `Gram = L L^T`.
    pub correction: DMatrix<f64>,
}

impl Block {
    fn new(params: &Params, parity: Parity, indices: Vec<usize>) -> Self {
        let a = params.a;
        let dim = match parity {
            Parity::Even => params.homogeneous_dim(),
            Parity::Odd => params.homogeneous_dim() + 2.0,
        };
        let alpha = dim / a - 1.0;
        let mass = params.mass_factor() / a * (a / 2.0).powf(dim / a);
        let n = indices.len();
        Self {
            parity,
            alpha,
            dim,
            norm: mass.powf(-0.5),
            indices,
            correction: DMatrix::identity(n, n),
        }
    }

    fn len(&self) -> usize {
        self.indices.len()
    }

    /// Analytic values and oscillator images at `x`.
    fn jets(&self, a: f64, x: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let r = x.abs();
        let u = 2.0 / a * r.powf(a);
        let q0 = laguerre_functions(self.alpha, n, u);
        let q1 = laguerre_functions(self.alpha + 1.0, n.saturating_sub(1), u);
        let q2 = laguerre_functions(self.alpha + 2.0, n.saturating_sub(2), u);
        let prefactor = match self.parity {
            Parity::Even => self.norm,
            Parity::Odd => self.norm * x,
        };
        let mut vals = Vec::with_capacity(n);
        let mut deltas = Vec::with_capacity(n);
        for j in 0..n {
            let jf = j as f64;
            // derivatives of p_j: p' = sqrt(j) p_{j-1}^{(alpha+1)}, p'' = sqrt(j(j-1)) p_{j-2}^{(alpha+2)}
            let dp = if j >= 1 { jf.sqrt() * q1[j - 1] } else { 0.0 };
            let ddp = if j >= 2 { (jf * (jf - 1.0)).sqrt() * q2[j - 2] } else { 0.0 };
            let g = q0[j];
            let g1 = dp - 0.5 * g;
            let g2 = ddp - dp + 0.25 * g;
            let dg = 2.0 * a * u * g2 + 2.0 * self.dim * g1 - 0.5 * a * u * g;
            vals.push(prefactor * g);
            deltas.push(prefactor * dg);
        }
        (vals, deltas)
    }
}

/// Orthonormal basis samples plus the oscillator matrix and its
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    params: Params,
    rule: Arc<QuadratureRule>,
    blocks: Vec<Block>,
    funcs: DMatrix<f64>,
    delta_funcs: DMatrix<f64>,
    gram_defect: f64,
    raw_gram_defect: f64,
    operator: DMatrix<f64>,
    asymmetry: f64,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

/// Builds `n_basis` orthonormal functions on `rule` and diagonalizes the
/// oscillator on their span.
pub fn build_basis(params: &Params, n_basis: usize, rule: Arc<QuadratureRule>) -> Result<SpectralBasis> {
    if rule.params() != params {
        return Err(Error::InvalidArgument("quadrature rule was built for different parameters".into()));
    }
    if n_basis == 0 || n_basis > rule.len() / 4 {
        return Err(Error::InvalidArgument(format!(
            "n_basis = {n_basis} must lie in 1..={} for {} nodes",
            rule.len() / 4,
            rule.len()
        )));
    }
    let mut blocks = match params.geometry {
        Geometry::Line => vec![
            Block::new(params, Parity::Even, (0..n_basis).step_by(2).collect()),
            Block::new(params, Parity::Odd, (1..n_basis).step_by(2).collect()),
        ],
        Geometry::Radial => vec![Block::new(params, Parity::Even, (0..n_basis).collect())],
    };
    blocks.retain(|b| b.len() > 0);

    let n_nodes = rule.len();
    let mut funcs = DMatrix::zeros(n_basis, n_nodes);
    let mut delta_funcs = DMatrix::zeros(n_basis, n_nodes);
    for (col, &x) in rule.nodes().iter().enumerate() {
        for b in &blocks {
            let (v, d) = b.jets(params.a, x);
            for (j, &n) in b.indices.iter().enumerate() {
                funcs[(n, col)] = v[j];
                delta_funcs[(n, col)] = d[j];
            }
        }
    }

    let raw_gram_defect = gram_defect(&rule, &funcs);
    if !(raw_gram_defect < RAW_GRAM_TOL) {
        return Err(Error::GramFailure(format!(
            "analytic basis deviates from orthonormal by {raw_gram_defect:.3e}; raise n_nodes or lower n_basis"
        )));
    }
    for b in &mut blocks {
        let rows = select_rows(&funcs, &b.indices);
        let gram = weighted_gram(&rule, &rows);
        let chol = gram
            .cholesky()
            .ok_or_else(|| Error::GramFailure("Gram matrix is not positive definite".into()))?;
        let linv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::GramFailure("singular Cholesky factor".into()))?;
        let fixed = &linv * rows;
        let fixed_delta = &linv * select_rows(&delta_funcs, &b.indices);
        for (j, &n) in b.indices.iter().enumerate() {
            funcs.set_row(n, &fixed.row(j));
            delta_funcs.set_row(n, &fixed_delta.row(j));
        }
        b.correction = linv;
    }
    let gram_defect = gram_defect(&rule, &funcs);
    if !(gram_defect < GRAM_TOL) {
        return Err(Error::GramFailure(format!("Gram defect {gram_defect:.3e} after correction")));
    }

    let op = assemble_operator_matrix(&rule, &funcs, &delta_funcs)?;
    let (eigvals, eigvecs) = block_eigen(&op.matrix, &blocks)?;

    Ok(SpectralBasis {
        params: *params,
        rule,
        blocks,
        funcs,
        delta_funcs,
        gram_defect,
        raw_gram_defect,
        operator: op.matrix,
        asymmetry: op.asymmetry,
        eigvals,
        eigvecs,
    })
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

fn weighted_gram(rule: &QuadratureRule, rows: &DMatrix<f64>) -> DMatrix<f64> {
    let mut weighted = rows.clone();
    for (mut col, w) in weighted.column_iter_mut().zip(rule.weights()) {
        col *= *w;
    }
    &weighted * rows.transpose()
}

fn gram_defect(rule: &QuadratureRule, funcs: &DMatrix<f64>) -> f64 {
    let g = weighted_gram(rule, funcs);
    let n = g.nrows();
    (g - DMatrix::identity(n, n)).amax()
}

/// Eigenpairs per parity block, eigenvalues descending within a block and
/// assigned to the block's indices in order; each eigenvector is signed so its
/// entry on its own index is positive.
fn block_eigen(d: &DMatrix<f64>, blocks: &[Block]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = d.nrows();
    let mut vals = DVector::zeros(n);
    let mut vecs = DMatrix::zeros(n, n);
    for b in blocks {
        let sub = DMatrix::from_fn(b.len(), b.len(), |i, j| d[(b.indices[i], b.indices[j])]);
        let eig = SymmetricEigen::new(sub.clone());
        let mut order: Vec<usize> = (0..b.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        for (slot, &src) in order.iter().enumerate() {
            let mut v = eig.eigenvectors.column(src).into_owned();
            let pivot = if v[slot].abs() > 0.5 { v[slot] } else { v[v.iamax()] };
            if pivot < 0.0 {
                v.neg_mut();
            }
            let target = b.indices[slot];
            vals[target] = eig.eigenvalues[src];
            for (i, &row) in b.indices.iter().enumerate() {
                vecs[(row, target)] = v[i];
            }
        }
        let residual = (&sub * select_cols(&vecs, &b.indices, &b.indices)
            - select_cols(&vecs, &b.indices, &b.indices) * DMatrix::from_diagonal(&select_vec(&vals, &b.indices)))
        .amax();
        if residual > EIGEN_TOL {
            return Err(Error::GramFailure(format!("eigen residual {residual:.3e}")));
        }
    }
    let orth = (vecs.transpose() * &vecs - DMatrix::identity(n, n)).amax();
    if orth > GRAM_TOL {
        return Err(Error::GramFailure(format!("eigenvectors not orthonormal ({orth:.3e})")));
    }
    Ok((vals, vecs))
}

fn select_cols(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn select_vec(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

impl SpectralBasis {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn rule_arc(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.funcs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `n_basis x n_nodes` samples of the orthonormal basis.
    pub fn funcs(&self) -> &DMatrix<f64> {
        &self.funcs
    }

    /// `n_basis x n_nodes` samples of `Delta_{k,a}` applied to each basis function.
    pub fn delta_funcs(&self) -> &DMatrix<f64> {
        &self.delta_funcs
    }

    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    /// Gram deviation of the analytic family before correction.
    pub fn raw_gram_defect(&self) -> f64 {
        self.raw_gram_defect
    }

    /// The oscillator matrix.
    pub fn operator(&self) -> &DMatrix<f64> {
        &self.operator
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    /// Columns are eigenvectors in basis coordinates.
    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn parity(&self, n: usize) -> Parity {
        match self.params.geometry {
            Geometry::Radial => Parity::Even,
            Geometry::Line => Parity::of_degree(n),
        }
    }

    /// All basis functions at an arbitrary point. In radial mode `x` is a radius.
    pub fn eval_all(&self, x: f64) -> DVector<f64> {
        let mut out = DVector::zeros(self.len());
        let x = match self.params.geometry {
            Geometry::Line => x,
            Geometry::Radial => x.abs(),
        };
        for b in &self.blocks {
            let (v, _) = b.jets(self.params.a, x);
            let fixed = &b.correction * DVector::from_vec(v);
            for (j, &n) in b.indices.iter().enumerate() {
                out[n] = fixed[j];
            }
        }
        out
    }

    /// Oscillator images of all basis functions at an arbitrary point.
    pub fn eval_all_delta(&self, x: f64) -> DVector<f64> {
        let mut out = DVector::zeros(self.len());
        for b in &self.blocks {
            let (_, d) = b.jets(self.params.a, x);
            let fixed = &b.correction * DVector::from_vec(d);
            for (j, &n) in b.indices.iter().enumerate() {
                out[n] = fixed[j];
            }
        }
        out
    }

    /// Eigenfunctions of the oscillator at `x`, ordered like `eigvals`.
    pub fn eigenfunctions_at(&self, x: f64) -> DVector<f64> {
        self.eigvecs.transpose() * self.eval_all(x)
    }

    /// Expansion coefficients `c_n = sum_i w_i phi_n(x_i) f_i` of real samples.
    pub fn project_real(&self, values: &[f64]) -> Result<DVector<f64>> {
        if values.len() != self.rule.len() {
            return Err(Error::ShapeMismatch {
                expected: self.rule.len(),
                got: values.len(),
            });
        }
        let wf = DVector::from_iterator(values.len(), values.iter().zip(self.rule.weights()).map(|(f, w)| f * w));
        Ok(&self.funcs * wf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_quadrature;

    fn basis(params: Params, n_basis: usize, n_nodes: usize) -> SpectralBasis {
        let rule = Arc::new(build_quadrature(&params, n_nodes, f64::INFINITY).unwrap());
        build_basis(&params, n_basis, rule).unwrap()
    }

    /// Normalized Hermite functions by the standard three-term recurrence.
    fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
        let mut h = vec![std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp()];
        if n > 1 {
            h.push(2f64.sqrt() * x * h[0]);
        }
        for j in 2..n {
            let jf = j as f64;
            h.push((2.0 / jf).sqrt() * x * h[j - 1] - ((jf - 1.0) / jf).sqrt() * h[j - 2]);
        }
        h
    }

    #[test]
    fn laguerre_orthonormal_small() {
        // alpha = 0: p_1 = u - 1 up to sign convention, p_1(0) = -1
        let q = laguerre_functions(0.0, 3, 0.0);
        assert!((q[0] - 1.0).abs() < 1e-15);
        assert!((q[1] + 1.0).abs() < 1e-15);
        assert!((q[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_reduction() {
        let b = basis(Params::new(1, 0.0, 2.0).unwrap(), 16, 256);
        for (i, &x) in b.rule().nodes().iter().enumerate() {
            let h = hermite_functions(16, x);
            for (n, hn) in h.iter().enumerate() {
                let v = b.funcs()[(n, i)];
                assert!((v.abs() - hn.abs()).abs() < 1e-6, "n={n} x={x}");
            }
        }
        for n in 0..16 {
            assert!((b.eigvals()[n] + (2 * n + 1) as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn spectrum_is_arithmetic() {
        for (k, a) in [(0.7, 1.5), (0.5, 2.0), (0.2, 3.0), (1.5, 0.75)] {
            let p = Params::new(1, k, a).unwrap();
            let b = basis(p, 32, 512);
            let d = p.homogeneous_dim();
            assert!(b.gram_defect() < GRAM_TOL);
            assert!((b.operator()[(0, 0)] + d).abs() < 1e-8);
            for n in 0..32 {
                let j = (n / 2) as f64;
                let expected = if n % 2 == 0 { -d - 2.0 * a * j } else { -(d + 2.0) - 2.0 * a * j };
                assert!((b.eigvals()[n] - expected).abs() < 1e-8, "{k} {a} n={n}");
            }
        }
    }

    #[test]
    fn radial_block() {
        let p = Params::radial(2, 0.0, 1.0).unwrap();
        let b = basis(p, 24, 256);
        for n in 0..24 {
            assert!((b.eigvals()[n] + 1.0 + 2.0 * n as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn off_grid_eval_matches_samples() {
        let p = Params::new(1, 0.7, 1.5).unwrap();
        let b = basis(p, 20, 256);
        for i in [3, 50, 128, 200] {
            let x = b.rule().nodes()[i];
            let v = b.eval_all(x);
            for n in 0..20 {
                assert!((v[n] - b.funcs()[(n, i)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn too_many_functions() {
        let p = Params::new(1, 0.0, 2.0).unwrap();
        let rule = Arc::new(build_quadrature(&p, 128, f64::INFINITY).unwrap());
        assert!(build_basis(&p, 33, rule).is_err());
    }
}
