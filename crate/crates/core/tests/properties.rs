use std::sync::OnceLock;

use kagft::dunkl::delta_ka_apply_fd;
use kagft::inequalities::{conjugate, hormander_bound, Exponents};
use kagft::multiplier::apply_multiplier_coeffs;
use kagft::params::Params;
use kagft::symbol::MultiplierSymbol;
use kagft::transform::{CVector, TransformOperator};
use num_complex::Complex64;
use proptest::prelude::*;

const NB: usize = 24;

fn operator() -> &'static TransformOperator {
    static T: OnceLock<TransformOperator> = OnceLock::new();
    T.get_or_init(|| TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), NB).unwrap())
}

fn vector(parts: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(parts.len(), parts.iter().map(|&(r, i)| Complex64::new(r, i)))
}

fn coeffs() -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), NB).prop_map(|v| vector(&v))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn transform_preserves_norm(c in coeffs()) {
        let t = operator();
        let f = t.forward_coeffs(&c).unwrap();
        prop_assert!((f.norm() - c.norm()).abs() <= 1e-10 * c.norm().max(1.0));
        let back = t.inverse_coeffs(&f).unwrap();
        prop_assert!((back - &c).norm() <= 1e-10 * c.norm().max(1.0));
    }

    #[test]
    fn multiplier_is_linear(f in coeffs(), g in coeffs(), s in -3.0..3.0f64) {
        let t = operator();
        let h = MultiplierSymbol::indicator(1.0).unwrap();
        let combo = &f + &g * Complex64::new(s, 0.0);
        let lhs = apply_multiplier_coeffs(t, &h, &combo).unwrap().coeffs;
        let af = apply_multiplier_coeffs(t, &h, &f).unwrap().coeffs;
        let ag = apply_multiplier_coeffs(t, &h, &g).unwrap().coeffs;
        let rhs = af + ag * Complex64::new(s, 0.0);
        prop_assert!((lhs - &rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn conjugate_exponents_sum_to_one(p in 1.0001..50.0f64) {
        let pc = conjugate(p);
        prop_assert!((1.0 / p + 1.0 / pc - 1.0).abs() < 1e-12);
        match Exponents::new(p) {
            Ok(ex) => prop_assert_eq!(ex.p_conj(), pc),
            Err(_) => prop_assert!(p > 2.0),
        }
    }

    #[test]
    fn bound_scales_with_symbol(c in 0.01..100.0f64, p in 1.1..2.0f64) {
        let t = operator();
        let q = conjugate(p);
        let d = t.params().homogeneous_dim();
        let gamma = d * (1.0 / p - 1.0 / q);
        let h = MultiplierSymbol::power(gamma).unwrap();
        let base = hormander_bound(t.rule(), &h, p, q).unwrap();
        let scaled = hormander_bound(t.rule(), &h.scaled(c), p, q).unwrap();
        prop_assert!(base.is_finite());
        prop_assert!((scaled.value - c * base.value).abs() <= 1e-9 * c * base.value);
    }

    #[test]
    fn indicator_bound_grows_with_radius(r in 0.1..2.0f64, dr in 0.01..1.0f64) {
        let t = operator();
        let small = hormander_bound(t.rule(), &MultiplierSymbol::indicator(r).unwrap(), 1.5, 3.0).unwrap();
        let large = hormander_bound(t.rule(), &MultiplierSymbol::indicator(r + dr).unwrap(), 1.5, 3.0).unwrap();
        prop_assert!(large.value >= small.value);
    }
}

/// The closed-form oscillator images of the basis agree with finite differences.
#[test]
fn symbolic_oscillator_matches_finite_differences() {
    for (dim, k, a) in [(1, 0.5, 2.0), (1, 0.7, 1.5), (1, 0.0, 2.0), (1, 1.0, 1.0)] {
        let t = TransformOperator::with_default_nodes(&Params::new(dim, k, a).unwrap(), 12).unwrap();
        let basis = t.basis();
        for &x in &[-2.1, -0.9, -0.4, 0.35, 0.8, 1.7] {
            let sym = basis.eval_all_delta(x);
            for n in 0..basis.len() {
                let fd = delta_ka_apply_fd(|y| basis.eval_all(y)[n], t.params(), x).unwrap();
                let scale = 1.0 + sym[n].abs();
                assert!(
                    (fd - sym[n]).abs() < 1e-5 * scale,
                    "k={k} a={a} x={x} n={n}: fd {fd} vs {}",
                    sym[n]
                );
            }
        }
    }
}
