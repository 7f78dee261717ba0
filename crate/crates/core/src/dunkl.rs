//! The one-dimensional Dunkl operator `T f = f' + k (f(x) - f(-x)) / x`, the
//! Dunkl Laplacian `T^2`, and the deformed oscillator
//! `Delta_{k,a} = |x|^{2-a} T^2 - |x|^a`.
//!
//! Two evaluation paths are provided: exact symbolic rules on
//! [`BasisFunction`] and centered finite differences on arbitrary closures.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::measure::QuadratureRule;
use crate::params::{Geometry, Params};

/// Exponents closer than this are merged.
const EXPONENT_MERGE_TOL: f64 = 1e-12;
/// Largest tolerated `|D - D^T|` entry before symmetrization.
pub const SELF_ADJOINT_TOL: f64 = 1e-6;
/// Relative step of the first-derivative stencil.
pub const FD_STEP: f64 = 1e-5;
/// Relative step of the second-derivative stencil.
pub const FD_STEP_SECOND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of the monomial `x^m`.
    pub fn of_degree(m: usize) -> Self {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// `f(x) = s(x) * sum_i c_i |x|^{e_i} * env(x)` where `s = 1` for even and
/// `s = sgn(x)` for odd functions, and `env` is `exp(-|x|^a / a)` or `1`.
///
/// Ordinary polynomials of a fixed parity are the special case of integer
/// exponents; the oscillator produces non-integer exponents `e + a` and
/// `e + 2 - a`, which this representation keeps exact.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    parity: Parity,
    terms: Vec<(f64, f64)>,
    envelope: Option<f64>,
}

impl BasisFunction {
    /// From `(coefficient, exponent)` pairs; exponents are powers of `|x|`.
    pub fn new(parity: Parity, terms: Vec<(f64, f64)>, envelope: Option<f64>) -> Result<Self> {
        if let Some(a) = envelope {
            if !(a > 0.0) {
                return Err(Error::InvalidArgument(format!("envelope exponent {a} must be positive")));
            }
        }
        if terms.iter().any(|(c, e)| !c.is_finite() || !e.is_finite()) {
            return Err(Error::InvalidArgument("non-finite term".into()));
        }
        Ok(Self {
            parity,
            terms,
            envelope,
        }
        .normalized())
    }

    /// `sum_m coeffs[m] x^m`; every nonzero coefficient must share one parity.
    pub fn polynomial(coeffs: &[f64], envelope: Option<f64>) -> Result<Self> {
        let mut parity = None;
        let mut terms = Vec::new();
        for (m, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let p = Parity::of_degree(m);
            if parity.is_some_and(|q| q != p) {
                return Err(Error::InvalidArgument("polynomial mixes even and odd degrees".into()));
            }
            parity = Some(p);
            terms.push((c, m as f64));
        }
        Self::new(parity.unwrap_or(Parity::Even), terms, envelope)
    }

    /// `exp(-|x|^a / a)`.
    pub fn ground_state(a: f64) -> Result<Self> {
        Self::new(Parity::Even, vec![(1.0, 0.0)], Some(a))
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn envelope(&self) -> Option<f64> {
        self.envelope
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let r = x.abs();
        let mut sum = 0.0;
        for &(c, e) in &self.terms {
            if r == 0.0 {
                if e < 0.0 {
                    return Err(Error::SingularAtOrigin { exponent: e });
                }
                if e == 0.0 {
                    sum += c;
                }
            } else {
                sum += c * r.powf(e);
            }
        }
        let s = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd if x == 0.0 => {
                // sgn(x)|x|^e has limit 0 for e > 0; e = 0 has no value there
                if self.terms.iter().any(|&(_, e)| e <= 0.0) {
                    return Err(Error::SingularAtOrigin { exponent: 0.0 });
                }
                0.0
            }
            Parity::Odd => x.signum(),
        };
        let env = self.envelope.map_or(1.0, |a| (-r.powf(a) / a).exp());
        Ok(s * sum * env)
    }

    fn normalized(mut self) -> Self {
        self.terms.sort_by(|p, q| p.1.total_cmp(&q.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms {
            match merged.last_mut() {
                Some(last) if (last.1 - e).abs() <= EXPONENT_MERGE_TOL => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|&(c, _)| c != 0.0);
        self.terms = merged;
        self
    }

    fn shifted(&self, de: f64, scale: f64) -> Vec<(f64, f64)> {
        self.terms.iter().map(|&(c, e)| (scale * c, e + de)).collect()
    }
}

/// Symbolic `T f`. Flips parity.
pub fn dunkl_apply(f: &BasisFunction, k: f64) -> BasisFunction {
    let mut terms = Vec::with_capacity(2 * f.terms.len());
    for &(c, e) in &f.terms {
        match f.parity {
            // d/dx |x|^e = e sgn(x) |x|^{e-1}; the reflection term vanishes
            Parity::Even => terms.push((c * e, e - 1.0)),
            // d/dx sgn|x|^e = e |x|^{e-1}; reflection adds 2k |x|^{e-1}
            Parity::Odd => terms.push((c * (e + 2.0 * k), e - 1.0)),
        }
        if let Some(a) = f.envelope {
            // derivative of the envelope: -sgn(x) |x|^{a-1}
            terms.push((-c, e + a - 1.0));
        }
    }
    BasisFunction {
        parity: f.parity.flip(),
        terms,
        envelope: f.envelope,
    }
    .normalized()
}

/// Symbolic `Delta_{k,a} f = |x|^{2-a} T^2 f - |x|^a f`. Preserves parity.
///
/// In radial mode the radial part of the Dunkl Laplacian is `f'' + 2 k' f'/x`
/// with `k' = <k> + (N-1)/2`, which is the even-block Dunkl Laplacian at
/// multiplicity `k'`; only even profiles are accepted there.
pub fn delta_ka_apply(f: &BasisFunction, params: &Params) -> Result<BasisFunction> {
    if params.geometry == Geometry::Radial && f.parity == Parity::Odd {
        return Err(Error::InvalidArgument("radial profiles must be even".into()));
    }
    let k = params.effective_k();
    let a = params.a;
    let tt = dunkl_apply(&dunkl_apply(f, k), k);
    let mut terms = tt.shifted(2.0 - a, 1.0);
    terms.extend(f.shifted(a, -1.0));
    Ok(BasisFunction {
        parity: f.parity,
        terms,
        envelope: f.envelope,
    }
    .normalized())
}

/// Characteristic length `(a/2)^{1/a}`, the point where `u = (2/a)|x|^a = 1`.
pub fn node_scale(a: f64) -> f64 {
    (a / 2.0).powf(1.0 / a)
}

/// Finite-difference `T f (x)` for `x != 0`.
pub fn dunkl_apply_fd<F: Fn(f64) -> f64>(f: F, k: f64, x: f64, scale: f64) -> f64 {
    let h = FD_STEP * scale;
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    d1 + k * (f(x) - f(-x)) / x
}

/// Finite-difference `Delta_{k,a} f (x)` for `x != 0`, using
/// `T^2 f = f'' + 2k f'/x - k (f(x) - f(-x)) / x^2` (line) or
/// `f'' + 2k' f'/x` (radial).
pub fn delta_ka_apply_fd<F: Fn(f64) -> f64>(f: F, params: &Params, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::SingularAtOrigin {
            exponent: 2.0 - params.a,
        });
    }
    let scale = node_scale(params.a);
    let h1 = FD_STEP * scale;
    let h2 = FD_STEP_SECOND * scale;
    let fx = f(x);
    let d1 = (f(x + h1) - f(x - h1)) / (2.0 * h1);
    // fourth-order stencil keeps truncation below rounding at this step
    let d2 = (-f(x + 2.0 * h2) + 16.0 * f(x + h2) - 30.0 * fx + 16.0 * f(x - h2) - f(x - 2.0 * h2))
        / (12.0 * h2 * h2);
    let k = params.effective_k();
    let tt = match params.geometry {
        Geometry::Line => d2 + 2.0 * k * d1 / x - k * (fx - f(-x)) / (x * x),
        Geometry::Radial => d2 + 2.0 * k * d1 / x,
    };
    let r = x.abs();
    Ok(r.powf(2.0 - params.a) * tt - r.powf(params.a) * fx)
}

/// The Galerkin matrix `D[m][n] = <Delta phi_n, phi_m>` with its asymmetry.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    /// `max |D - D^T|` before symmetrization.
    pub asymmetry: f64,
}

/// Assembles `D` from sampled basis values and sampled oscillator images
/// (both `n_basis x n_nodes`) and symmetrizes it.
pub fn assemble_operator_matrix(
    rule: &QuadratureRule,
    funcs: &DMatrix<f64>,
    delta_funcs: &DMatrix<f64>,
) -> Result<OperatorMatrix> {
    if funcs.shape() != delta_funcs.shape() || funcs.ncols() != rule.len() {
        return Err(Error::ShapeMismatch {
            expected: rule.len(),
            got: funcs.ncols(),
        });
    }
    let w = nalgebra::DVector::from_column_slice(rule.weights());
    let mut weighted = funcs.clone();
    for (mut col, wi) in weighted.column_iter_mut().zip(w.iter()) {
        col *= *wi;
    }
    // D[m][n] = sum_i w_i phi_m(x_i) (Delta phi_n)(x_i)
    let d = &weighted * delta_funcs.transpose();
    let asymmetry = (&d - d.transpose()).amax();
    if asymmetry > SELF_ADJOINT_TOL {
        return Err(Error::SelfAdjointnessDefect { defect: asymmetry });
    }
    let matrix = (&d + d.transpose()) * 0.5;
    Ok(OperatorMatrix { matrix, asymmetry })
}

/// `D` for an already-built basis.
pub fn build_operator_matrix(basis: &crate::transform::SpectralBasis) -> Result<OperatorMatrix> {
    assemble_operator_matrix(basis.rule(), basis.funcs(), basis.delta_funcs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(f: &BasisFunction, g: &BasisFunction, xs: &[f64]) -> bool {
        xs.iter()
            .all(|&x| (f.eval(x).unwrap() - g.eval(x).unwrap()).abs() <= 1e-12 * (1.0 + g.eval(x).unwrap().abs()))
    }

    #[test]
    fn dunkl_of_x_is_constant() {
        for k in [0.0, 0.3, 2.5] {
            let f = BasisFunction::polynomial(&[0.0, 1.0], None).unwrap();
            let tf = dunkl_apply(&f, k);
            assert_eq!(tf.parity(), Parity::Even);
            assert_eq!(tf.terms(), &[(1.0 + 2.0 * k, 0.0)]);
            assert_eq!(tf.eval(0.0).unwrap(), 1.0 + 2.0 * k);
        }
    }

    #[test]
    fn dunkl_on_even_is_derivative() {
        let f = BasisFunction::polynomial(&[0.0, 0.0, 1.0], None).unwrap();
        let tf = dunkl_apply(&f, 0.7);
        let expected = BasisFunction::polynomial(&[0.0, 2.0], None).unwrap();
        assert!(close(&tf, &expected, &[-1.3, 0.2, 2.0]));
    }

    #[test]
    fn ground_state_eigenvalue() {
        for (k, a) in [(0.0, 2.0), (0.5, 2.0), (0.7, 1.5), (0.2, 0.8), (1.0, 3.0)] {
            let p = Params::new(1, k, a).unwrap();
            let g = BasisFunction::ground_state(a).unwrap();
            let dg = delta_ka_apply(&g, &p).unwrap();
            assert_eq!(dg.terms().len(), 1);
            let (c, e) = dg.terms()[0];
            assert!((c + (2.0 * k + a - 1.0)).abs() < 1e-14 && e.abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_oscillator_case() {
        let p = Params::new(1, 0.0, 2.0).unwrap();
        // x e^{-x^2/2} has eigenvalue -3
        let f = BasisFunction::polynomial(&[0.0, 1.0], Some(2.0)).unwrap();
        let df = delta_ka_apply(&f, &p).unwrap();
        let expected = BasisFunction::polynomial(&[0.0, -3.0], Some(2.0)).unwrap();
        assert!(close(&df, &expected, &[-2.0, -0.3, 0.5, 1.7]));
    }

    #[test]
    fn parity_preserved() {
        let p = Params::new(1, 0.4, 1.3).unwrap();
        for coeffs in [vec![1.0, 0.0, -2.0], vec![0.0, 1.5, 0.0, 0.5]] {
            let f = BasisFunction::polynomial(&coeffs, Some(1.3)).unwrap();
            let df = delta_ka_apply(&f, &p).unwrap();
            assert_eq!(df.parity(), f.parity());
            for x in [0.3, 1.1, 2.4] {
                let s = if f.parity() == Parity::Even { 1.0 } else { -1.0 };
                assert!((df.eval(-x).unwrap() - s * df.eval(x).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symbolic_matches_fd() {
        for (k, a) in [(0.5, 2.0), (0.7, 1.5), (0.3, 2.6)] {
            let p = Params::new(1, k, a).unwrap();
            for coeffs in [vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 0.0, -0.3]] {
                let f = BasisFunction::polynomial(&coeffs, Some(a)).unwrap();
                let df = delta_ka_apply(&f, &p).unwrap();
                for x in [-1.7, -0.6, 0.4, 1.2, 2.5] {
                    let fd = delta_ka_apply_fd(|y| f.eval(y).unwrap(), &p, x).unwrap();
                    assert!((fd - df.eval(x).unwrap()).abs() < 1e-6, "{k} {a} {x}");
                }
                let tf = dunkl_apply(&f, k);
                let fd = dunkl_apply_fd(|y| f.eval(y).unwrap(), k, 0.9, 1.0);
                assert!((fd - tf.eval(0.9).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn origin_singularity() {
        let p = Params::new(1, 0.5, 3.0).unwrap();
        let g = BasisFunction::ground_state(3.0).unwrap();
        assert!(delta_ka_apply(&g, &p).unwrap().eval(0.0).is_ok());
        // |x|^{2-a} pushes x^2 e^{-|x|^3/3} onto a negative power at a = 3
        let x2 = BasisFunction::polynomial(&[0.0, 0.0, 1.0], Some(3.0)).unwrap();
        let dx2 = delta_ka_apply(&x2, &p).unwrap();
        assert!(matches!(dx2.eval(0.0), Err(Error::SingularAtOrigin { .. })));
        assert!(dx2.eval(0.5).is_ok());
        assert!(delta_ka_apply_fd(|y| g.eval(y).unwrap(), &p, 0.0).is_err());
        let singular = BasisFunction::new(Parity::Even, vec![(1.0, -1.0)], None).unwrap();
        assert!(matches!(singular.eval(0.0), Err(Error::SingularAtOrigin { .. })));
    }

    #[test]
    fn mixed_parity_rejected() {
        assert!(BasisFunction::polynomial(&[1.0, 1.0], None).is_err());
    }
}
