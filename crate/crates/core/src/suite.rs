//! Test-function families in basis coordinates.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Geometry;
use crate::transform::{CVector, TransformOperator};

pub const DEFAULT_SEED: u64 = 42;
/// Number of Gaussians and of random vectors in the operator-norm families.
pub const FAMILY_SIZE: usize = 64;

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub label: String,
    pub coeffs: CVector,
    /// Relative L2 residual of projecting the analytic function onto the basis.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    Gaussians,
    BasisVectors,
    RandomBandlimited,
}

impl TestFamily {
    pub const ALL: [TestFamily; 3] = [TestFamily::Gaussians, TestFamily::BasisVectors, TestFamily::RandomBandlimited];

    pub fn parse(s: &str) -> Result<Vec<TestFamily>> {
        match s.trim() {
            "default" | "all" => Ok(Self::ALL.to_vec()),
            "gaussians" => Ok(vec![TestFamily::Gaussians]),
            "basis_vectors" | "basis" => Ok(vec![TestFamily::BasisVectors]),
            "random_bandlimited" | "random" => Ok(vec![TestFamily::RandomBandlimited]),
            other => Err(Error::InvalidSpec {
                spec: other.to_string(),
                reason: "expected default, gaussians, basis_vectors or random_bandlimited".into(),
            }),
        }
    }
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Projects `f(x)` sampled on the transform's nodes.
pub fn project_fn<F: Fn(f64) -> f64>(t: &TransformOperator, label: String, f: F) -> Result<TestFunction> {
    let values: Vec<Complex64> = t.rule().nodes().iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
    let p = t.project(&values)?;
    Ok(TestFunction {
        label,
        coeffs: p.coeffs,
        residual: p.residual,
    })
}

/// `exp(-s |x|^a / a)`.
pub fn gaussian(t: &TransformOperator, s: f64) -> Result<TestFunction> {
    let a = t.params().a;
    project_fn(t, format!("gauss_s{s:.4}"), move |x| (-s * x.abs().powf(a) / a).exp())
}

/// `x exp(-s |x|^a / a)` (line only).
pub fn odd_gaussian(t: &TransformOperator, s: f64) -> Result<TestFunction> {
    let a = t.params().a;
    project_fn(t, format!("odd_s{s:.4}"), move |x| x * (-s * x.abs().powf(a) / a).exp())
}

/// `(1 + c x) exp(-s |x|^a / a)` on the line, `(1 + c |x|^a) exp(..)` radially.
pub fn mixed_gaussian(t: &TransformOperator, s: f64, c: f64) -> Result<TestFunction> {
    let a = t.params().a;
    let radial = t.params().geometry == Geometry::Radial;
    project_fn(t, format!("mixed_s{s:.4}_c{c:.2}"), move |x| {
        let lin = if radial { x.abs().powf(a) } else { x };
        (1.0 + c * lin) * (-s * x.abs().powf(a) / a).exp()
    })
}

/// Complex Gaussian coefficients on the lower half of the basis.
pub fn random_bandlimited(n_basis: usize, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = n_basis.div_ceil(2);
    (0..count)
        .map(|i| {
            let coeffs = CVector::from_iterator(
                n_basis,
                (0..n_basis).map(|n| {
                    if n < band {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
            );
            TestFunction {
                label: format!("random_{seed}_{i}"),
                coeffs,
                residual: 0.0,
            }
        })
        .collect()
}

pub fn basis_vectors(n_basis: usize) -> Vec<TestFunction> {
    (0..n_basis)
        .map(|n| {
            let mut coeffs = CVector::zeros(n_basis);
            coeffs[n] = Complex64::new(1.0, 0.0);
            TestFunction {
                label: format!("basis_{n}"),
                coeffs,
                residual: 0.0,
            }
        })
        .collect()
}

/// The 20-function suite used by the inequality checks.
pub fn default_suite(t: &TransformOperator, seed: u64) -> Result<Vec<TestFunction>> {
    let mut out = Vec::with_capacity(20);
    let scales = log_spaced(0.5, 2.0, 8);
    for &s in &scales {
        out.push(gaussian(t, s)?);
    }
    let few = [0.5, 0.8, 1.25, 2.0];
    match t.params().geometry {
        Geometry::Line => {
            for &s in &few {
                out.push(odd_gaussian(t, s)?);
            }
        }
        Geometry::Radial => {
            for &s in &few {
                out.push(mixed_gaussian(t, s, -0.5)?);
            }
        }
    }
    for (&s, c) in few.iter().zip([0.5, -1.0, 2.0, -0.3]) {
        out.push(mixed_gaussian(t, s, c)?);
    }
    out.extend(random_bandlimited(t.len(), 4, seed));
    Ok(out)
}

/// Members of the requested operator-norm families.
pub fn family(t: &TransformOperator, fam: TestFamily, n_samples: usize, seed: u64) -> Result<Vec<TestFunction>> {
    match fam {
        TestFamily::Gaussians => log_spaced(0.25, 4.0, n_samples).into_iter().map(|s| gaussian(t, s)).collect(),
        TestFamily::BasisVectors => Ok(basis_vectors(t.len())),
        TestFamily::RandomBandlimited => Ok(random_bandlimited(t.len(), n_samples, seed)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    #[test]
    fn suite_shape_and_determinism() {
        let t = TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), 32).unwrap();
        let a = default_suite(&t, 7).unwrap();
        let b = default_suite(&t, 7).unwrap();
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.coeffs, y.coeffs);
            assert!(x.residual < 1e-6, "{} {}", x.label, x.residual);
        }
        let c = random_bandlimited(32, 2, 8);
        assert_ne!(c[0].coeffs, a[16].coeffs);
    }

    #[test]
    fn family_sizes() {
        let t = TransformOperator::with_default_nodes(&Params::radial(2, 0.0, 1.0).unwrap(), 16).unwrap();
        assert_eq!(family(&t, TestFamily::Gaussians, 64, 1).unwrap().len(), 64);
        assert_eq!(family(&t, TestFamily::BasisVectors, 64, 1).unwrap().len(), 16);
        assert_eq!(TestFamily::parse("default").unwrap().len(), 3);
        assert!(TestFamily::parse("nope").is_err());
    }
}
