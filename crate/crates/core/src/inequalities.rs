//! Both sides of the Paley, Hausdorff-Young, Hausdorff-Young-Paley and
//! Hormander-bound inequalities.
//!
//! Paley and Hausdorff-Young are the `b = p` and `b = p'` ends of one weighted
//! norm, so all three go through [`hyp_ratio`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{level_functional, lp_norm_values, paley_functional, LevelValue, QuadratureRule};
use crate::symbol::MultiplierSymbol;
use crate::transform::{CVector, TransformOperator};

/// `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: f64,
    pub b: Option<f64>,
    pub q: Option<f64>,
}

impl Exponents {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::ExponentOutOfRange(format!("p = {p} must lie in (1, 2]")));
        }
        Ok(Self { p, b: None, q: None })
    }

    pub fn with_b(mut self, b: f64) -> Result<Self> {
        let pc = self.p_conj();
        if !(b >= self.p && b <= pc) {
            return Err(Error::ExponentOutOfRange(format!("b = {b} must lie in [{}, {pc}]", self.p)));
        }
        self.b = Some(b);
        Ok(self)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        if !(q >= 2.0 && q.is_finite()) {
            return Err(Error::ExponentOutOfRange(format!("q = {q} must lie in [2, inf)")));
        }
        self.q = Some(q);
        Ok(self)
    }

    pub fn p_conj(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_conj(&self) -> Option<f64> {
        self.q.map(conjugate)
    }

    /// `1/p - 1/q`.
    pub fn theta(&self) -> Option<f64> {
        self.q.map(|q| 1.0 / self.p - 1.0 / q)
    }

    /// `r` with `1/r = 1/p - 1/q` (infinite when `p = q = 2`).
    pub fn r(&self) -> Option<f64> {
        self.theta().map(|t| 1.0 / t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs_core: f64,
    pub ratio: f64,
}

impl Ratio {
    fn new(lhs: f64, rhs_core: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs_core };
        Self { lhs, rhs_core, ratio }
    }
}

/// `(sum_i w_i (|g_i| psi_i^e)^b)^{1/b}`; the weight is skipped entirely when `e = 0`.
fn weighted_norm(rule: &QuadratureRule, g: &[Complex64], psi: &MultiplierSymbol, e: f64, b: f64) -> Result<f64> {
    if e == 0.0 {
        return lp_norm_values(rule, g, b);
    }
    let weighted: Vec<Complex64> = g
        .iter()
        .zip(rule.nodes())
        .map(|(v, &xi)| Complex64::new(v.norm() * psi.eval(xi).abs().powf(e), 0.0))
        .collect();
    lp_norm_values(rule, &weighted, b)
}

/// `(int (|Ff| psi^{1/b - 1/p'})^b dmu)^{1/b}` against `M_psi^{1/b - 1/p'} ||f||_p`.
pub fn hyp_ratio(t: &TransformOperator, f: &CVector, psi: &MultiplierSymbol, p: f64, b: f64) -> Result<Ratio> {
    let ex = Exponents::new(p)?.with_b(b)?;
    let e = 1.0 / b - 1.0 / ex.p_conj();
    let rule = t.rule();
    let ff = t.synthesize(&t.forward_coeffs(f)?);
    let lhs = weighted_norm(rule, &ff, psi, e, b)?;
    let norm_f = lp_norm_values(rule, &t.synthesize(f), p)?;
    let m = if e == 0.0 {
        1.0
    } else {
        let m = paley_functional(rule, psi).value;
        if !m.is_finite() {
            return Err(Error::InfinitePaleyFunctional);
        }
        m.powf(e)
    };
    Ok(Ratio::new(lhs, m * norm_f))
}

/// `(int |Ff|^p psi^{2-p} dmu)^{1/p}` against `M_psi^{(2-p)/p} ||f||_p`.
pub fn paley_ratio(t: &TransformOperator, f: &CVector, psi: &MultiplierSymbol, p: f64) -> Result<Ratio> {
    hyp_ratio(t, f, psi, p, p)
}

/// `||Ff||_{p'}` against `M^{2/p - 1} ||f||_p` with `M` the kernel bound.
pub fn hy_ratio(t: &TransformOperator, f: &CVector, p: f64, kernel_bound: f64) -> Result<Ratio> {
    let pc = Exponents::new(p)?.p_conj();
    let base = hyp_ratio(t, f, &MultiplierSymbol::identity(), p, pc)?;
    Ok(Ratio::new(base.lhs, kernel_bound.powf(2.0 / p - 1.0) * base.rhs_core))
}

/// `sup_s s mu{|h| >= s}^{1/p - 1/q}`.
pub fn hormander_bound(rule: &QuadratureRule, h: &MultiplierSymbol, p: f64, q: f64) -> Result<LevelValue> {
    let ex = Exponents::new(p)?.with_q(q)?;
    Ok(level_functional(rule, h, ex.theta().expect("q set")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_quadrature;
    use crate::params::Params;
    use crate::suite;

    fn op() -> TransformOperator {
        TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), 32).unwrap()
    }

    #[test]
    fn exponent_checks() {
        assert!(Exponents::new(1.0).is_err());
        assert!(Exponents::new(2.5).is_err());
        let e = Exponents::new(1.5).unwrap();
        assert_eq!(e.p_conj(), 3.0);
        assert!(e.with_b(1.4).is_err());
        assert!(e.with_b(3.1).is_err());
        assert!(e.with_q(1.5).is_err());
        assert!((e.with_q(3.0).unwrap().r().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn plancherel_endpoint() {
        let t = op();
        let psi = MultiplierSymbol::power(2.0).unwrap();
        for f in suite::default_suite(&t, 1).unwrap() {
            let r = paley_ratio(&t, &f.coeffs, &psi, 2.0).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_function() {
        let t = op();
        let psi = MultiplierSymbol::power(2.0).unwrap();
        let r = paley_ratio(&t, &CVector::zeros(32), &psi, 1.5).unwrap();
        assert_eq!((r.lhs, r.ratio), (0.0, 0.0));
    }

    #[test]
    fn endpoints_share_the_path() {
        let t = op();
        let psi = MultiplierSymbol::power(2.0).unwrap();
        let f = &suite::random_bandlimited(32, 1, 5)[0].coeffs;
        let p = 1.25;
        let a = hyp_ratio(&t, f, &psi, p, p).unwrap();
        let b = paley_ratio(&t, f, &psi, p).unwrap();
        assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
        assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());
        let c = hyp_ratio(&t, f, &psi, p, conjugate(p)).unwrap();
        let d = hy_ratio(&t, f, p, 1.0).unwrap();
        assert_eq!(c.lhs.to_bits(), d.lhs.to_bits());
        assert_eq!(c.rhs_core.to_bits(), d.rhs_core.to_bits());
    }

    #[test]
    fn infinite_paley() {
        let t = op();
        let psi = MultiplierSymbol::power(1.0).unwrap();
        let f = &suite::random_bandlimited(32, 1, 5)[0].coeffs;
        assert!(matches!(paley_ratio(&t, f, &psi, 1.5), Err(Error::InfinitePaleyFunctional)));
        assert!(matches!(hyp_ratio(&t, f, &psi, 1.5, 3.5), Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn hormander_examples() {
        let p = Params::new(1, 0.5, 2.0).unwrap();
        let rule = build_quadrature(&p, 256, f64::INFINITY).unwrap();
        let d = 2.0;
        let (pp, q) = (1.5, 4.0);
        let theta = 1.0 / pp - 1.0 / q;
        let h = MultiplierSymbol::power(theta * d).unwrap();
        let v = hormander_bound(&rule, &h, pp, q).unwrap();
        assert!(v.exact && (v.value - (2.0 / d).powf(theta)).abs() < 1e-12);
        let h = MultiplierSymbol::power(0.5 * theta * d).unwrap();
        assert_eq!(hormander_bound(&rule, &h, pp, q).unwrap().value, f64::INFINITY);
        let ind = MultiplierSymbol::indicator(1.0).unwrap();
        assert!((hormander_bound(&rule, &ind, pp, q).unwrap().value - (2.0 / d).powf(theta)).abs() < 1e-12);
        // nested indicators are ordered
        let small = hormander_bound(&rule, &MultiplierSymbol::indicator(0.5).unwrap(), pp, q).unwrap();
        assert!(small.value <= hormander_bound(&rule, &ind, pp, q).unwrap().value);
        // homogeneity for closed forms
        let h = MultiplierSymbol::power(theta * d).unwrap();
        let base = hormander_bound(&rule, &h, pp, q).unwrap().value;
        let scaled = hormander_bound(&rule, &h.scaled(3.0), pp, q).unwrap().value;
        assert!((scaled - 3.0 * base).abs() < 1e-10);
    }
}
