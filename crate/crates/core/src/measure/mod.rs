//! The measure `mu_{k,a}`: density, quadrature, weighted norms and
//! superlevel-set functionals.

mod quadrature;
mod superlevel;

use std::sync::Arc;

use num_complex::Complex64;

pub use quadrature::{build_quadrature, gauss_laguerre, QuadratureRule, CALIBRATION_TOL};
pub use superlevel::{
    ball_measure, level_functional, paley_functional, superlevel_measure, LevelValue,
    Superlevel, T_GRID_LEN, T_GRID_MAX, T_GRID_MIN,
};

use crate::error::{Error, Result};
use crate::params::Params;

/// Density `v_{k,a}` of `mu_{k,a}`: `|x|^{2k+a-2}` on the line, the radial
/// density `r^{2<k>+N+a-3}` in radial mode (angular factor set to 1).
pub fn weight_vka(x: f64, params: &Params) -> Result<f64> {
    density_power(x, params.density_exponent())
}

/// The same density for raw `(N, k, a)` without admissibility checks.
pub fn weight_vka_raw(x: f64, dim: usize, k: f64, a: f64) -> Result<f64> {
    density_power(x, 2.0 * k + dim as f64 + a - 3.0)
}

fn density_power(x: f64, e: f64) -> Result<f64> {
    let r = x.abs();
    if r == 0.0 {
        return if e < 0.0 {
            Err(Error::SingularAtOrigin { exponent: e })
        } else if e == 0.0 {
            Ok(1.0)
        } else {
            Ok(0.0)
        };
    }
    Ok(r.powf(e))
}

/// Samples of a function on the nodes of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::ShapeMismatch {
                expected: rule.len(),
                got: values.len(),
            });
        }
        Ok(Self { rule, values })
    }

    pub fn zeros(rule: Arc<QuadratureRule>) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); rule.len()];
        Self { rule, values }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(rule: Arc<QuadratureRule>, f: F) -> Self {
        let values = rule.nodes().iter().map(|&x| f(x)).collect();
        Self { rule, values }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(rule: Arc<QuadratureRule>, f: F) -> Self {
        Self::from_fn(rule, |x| Complex64::new(f(x), 0.0))
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            rule: self.rule.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        if other.values.len() != self.values.len() {
            return Err(Error::ShapeMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(Self {
            rule: self.rule.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// `(sum_i w_i |f_i|^p)^{1/p}` for `p` in `[1, inf)`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_values(&self.rule, &self.values, p)
    }

    /// Max over nodes.
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Weighted `L^p` norm of values aligned with `rule`.
pub fn lp_norm_values(rule: &QuadratureRule, values: &[Complex64], p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in [1, inf)")));
    }
    if values.len() != rule.len() {
        return Err(Error::ShapeMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    let sum: f64 = values
        .iter()
        .zip(rule.weights())
        .map(|(v, w)| w * v.norm().powf(p))
        .sum();
    Ok(sum.powf(1.0 / p))
}
