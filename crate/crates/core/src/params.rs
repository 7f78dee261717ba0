//! Parameter validation for the deformed transform.
//!
//! In one dimension the root system is `Z_2`, so the multiplicity index equals
//! `k` and the Dunkl weight is `|x|^{2k}`. For `N >= 2` only radial profiles are
//! supported; there `k` is taken to be the index `<k>` directly and the angular
//! factor is integrated out.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const RATIONAL_TOL: f64 = 1e-12;
const MAX_DENOMINATOR: u32 = 64;

/// How functions on `R^N` are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Full real line, both parities (`N = 1`).
    Line,
    /// Radial profiles on the half-line `r > 0`.
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub dim: usize,
    pub k: f64,
    pub a: f64,
    pub geometry: Geometry,
}

impl Params {
    /// Line geometry for `N = 1`, radial otherwise.
    pub fn new(dim: usize, k: f64, a: f64) -> Result<Self> {
        let geometry = if dim == 1 { Geometry::Line } else { Geometry::Radial };
        Self::with_geometry(dim, k, a, geometry)
    }

    pub fn radial(dim: usize, k: f64, a: f64) -> Result<Self> {
        Self::with_geometry(dim, k, a, Geometry::Radial)
    }

    pub fn with_geometry(dim: usize, k: f64, a: f64, geometry: Geometry) -> Result<Self> {
        check_invariants(dim, k, a)?;
        if dim >= 2 && geometry == Geometry::Line {
            return Err(Error::InadmissibleParams(format!(
                "N = {dim} requires radial mode"
            )));
        }
        Ok(Self { dim, k, a, geometry })
    }

    /// `<k>`, half the sum of the multiplicities over the roots.
    pub fn k_index(&self) -> f64 {
        self.k
    }

    /// Homogeneous dimension `2<k> + N + a - 2`.
    pub fn homogeneous_dim(&self) -> f64 {
        2.0 * self.k_index() + self.dim as f64 + self.a - 2.0
    }

    /// Multiplicity of the equivalent one-dimensional even problem.
    ///
    /// The radial part of the Dunkl Laplacian is `f'' + (2<k> + N - 1) f'/r`,
    /// which is the 1D even-block operator with `k_eff = <k> + (N-1)/2`.
    pub fn effective_k(&self) -> f64 {
        self.k_index() + (self.dim as f64 - 1.0) / 2.0
    }

    /// Number of half-lines covered by the measure (2 on the line, 1 radially).
    pub fn mass_factor(&self) -> f64 {
        match self.geometry {
            Geometry::Line => 2.0,
            Geometry::Radial => 1.0,
        }
    }

    /// Exponent `e` of the density `|x|^e` of `mu_{k,a}` (radial density in radial mode).
    pub fn density_exponent(&self) -> f64 {
        self.homogeneous_dim() - 1.0
    }

    pub fn report(&self) -> AdmissibilityReport {
        validate(self.dim, self.k, self.a).expect("Params invariants already checked")
    }
}

fn check_invariants(dim: usize, k: f64, a: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::InadmissibleParams("N must be at least 1".into()));
    }
    if !k.is_finite() || !a.is_finite() {
        return Err(Error::InadmissibleParams("k and a must be finite".into()));
    }
    if a <= 0.0 {
        return Err(Error::InadmissibleParams(format!("a = {a} must be positive")));
    }
    if k < 0.0 {
        return Err(Error::InadmissibleParams(format!("k = {k} must be non-negative")));
    }
    let gap = a + 2.0 * k + dim as f64 - 2.0;
    if gap <= 0.0 {
        return Err(Error::InadmissibleParams(format!(
            "a + 2<k> + N - 2 = {gap} must be positive"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum KernelCase {
    #[serde(rename = "N1_any_a")]
    N1AnyA,
    #[serde(rename = "a_eq_1")]
    AEq1,
    #[serde(rename = "a_eq_2")]
    AEq2,
    #[serde(rename = "k0_a_2_over_m")]
    K0ATwoOverM,
}

impl KernelCase {
    pub fn label(self) -> &'static str {
        match self {
            KernelCase::N1AnyA => "N1_any_a",
            KernelCase::AEq1 => "a_eq_1",
            KernelCase::AEq2 => "a_eq_2",
            KernelCase::K0ATwoOverM => "k0_a_2_over_m",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub dim: usize,
    pub k: f64,
    pub a: f64,
    pub k_index: f64,
    pub homogeneous_dim: f64,
    pub admissible: bool,
    pub bounded_kernel_cases: BTreeSet<KernelCase>,
    pub conjecture_regime: bool,
    pub notes: String,
}

/// Checks `(N, k, a)` against the standing assumptions and records which
/// kernel-boundedness cases apply.
pub fn validate(dim: usize, k: f64, a: f64) -> Result<AdmissibilityReport> {
    check_invariants(dim, k, a)?;
    let k_index = k;
    let n = dim as f64;
    let mut cases = BTreeSet::new();
    if dim == 1 {
        cases.insert(KernelCase::N1AnyA);
    }
    if (a - 1.0).abs() <= RATIONAL_TOL && 2.0 * k_index + n - 2.0 >= 0.0 {
        cases.insert(KernelCase::AEq1);
    }
    if (a - 2.0).abs() <= RATIONAL_TOL {
        cases.insert(KernelCase::AEq2);
    }
    if k == 0.0 && two_over_integer(a).is_some() {
        cases.insert(KernelCase::K0ATwoOverM);
    }
    let conjecture_regime = a + 2.0 * k_index + n - 3.0 >= 0.0;
    let admissible = !cases.is_empty() || conjecture_regime;

    let mut notes = Vec::new();
    if cases.is_empty() && conjecture_regime {
        notes.push("kernel bound relies on the conjectured estimate |B| <= 1; not asserted");
    }
    if !admissible {
        notes.push("no kernel-boundedness case applies");
    }
    if dim >= 2 {
        notes.push("N >= 2: radial profiles only");
    }

    Ok(AdmissibilityReport {
        dim,
        k,
        a,
        k_index,
        homogeneous_dim: 2.0 * k_index + n + a - 2.0,
        admissible,
        bounded_kernel_cases: cases,
        conjecture_regime,
        notes: notes.join("; "),
    })
}

/// Returns `m` if `a = 2/m` for an integer `1 <= m <= 64`.
fn two_over_integer(a: f64) -> Option<u32> {
    (1..=MAX_DENOMINATOR).find(|&m| (a - 2.0 / m as f64).abs() <= RATIONAL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_fourier_case() {
        let r = validate(1, 0.0, 2.0).unwrap();
        assert!(r.admissible);
        assert!(r.conjecture_regime);
        let expected: BTreeSet<_> =
            [KernelCase::N1AnyA, KernelCase::AEq2, KernelCase::K0ATwoOverM].into();
        assert_eq!(r.bounded_kernel_cases, expected);
    }

    #[test]
    fn boundary_is_rejected() {
        assert!(matches!(validate(1, 0.0, 1.0), Err(Error::InadmissibleParams(_))));
        assert!(matches!(validate(1, -0.1, 2.0), Err(Error::InadmissibleParams(_))));
        assert!(matches!(validate(1, 0.0, 0.0), Err(Error::InadmissibleParams(_))));
        assert!(matches!(validate(0, 0.0, 2.0), Err(Error::InadmissibleParams(_))));
    }

    #[test]
    fn conjecture_only_regime() {
        let r = validate(2, 0.0, 3.0).unwrap();
        assert!(r.admissible);
        assert!(r.conjecture_regime);
        assert!(r.bounded_kernel_cases.is_empty());
    }

    #[test]
    fn a_equals_one_needs_dimension() {
        let r = validate(2, 0.0, 1.0).unwrap();
        assert!(r.bounded_kernel_cases.contains(&KernelCase::AEq1));
        assert!(r.bounded_kernel_cases.contains(&KernelCase::K0ATwoOverM));
        assert!(!r.bounded_kernel_cases.contains(&KernelCase::N1AnyA));
    }

    #[test]
    fn rational_detection() {
        assert_eq!(two_over_integer(2.0 / 3.0), Some(3));
        assert_eq!(two_over_integer(2.0 / 64.0), Some(64));
        assert_eq!(two_over_integer(0.7), None);
        let r = validate(3, 0.0, 0.5).unwrap();
        assert!(r.bounded_kernel_cases.contains(&KernelCase::K0ATwoOverM));
        let r = validate(3, 0.1, 0.5).unwrap();
        assert!(!r.bounded_kernel_cases.contains(&KernelCase::K0ATwoOverM));
    }

    #[test]
    fn radial_requirement() {
        assert!(Params::with_geometry(2, 0.0, 1.0, Geometry::Line).is_err());
        let p = Params::new(2, 0.0, 1.0).unwrap();
        assert_eq!(p.geometry, Geometry::Radial);
        assert_eq!(p.effective_k(), 0.5);
        assert_eq!(p.homogeneous_dim(), 1.0);
    }

    #[test]
    fn serializes_labels() {
        let r = validate(1, 0.0, 2.0).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"N1_any_a\""));
        assert!(s.contains("\"k0_a_2_over_m\""));
    }

    #[test]
    fn a_eq_2_always_flagged() {
        for k in [0.0, 0.3, 1.0, 2.5] {
            for dim in 1..4 {
                let r = validate(dim, k, 2.0).unwrap();
                assert!(r.bounded_kernel_cases.contains(&KernelCase::AEq2));
            }
        }
    }
}
