//! Quadrature against `dmu_{k,a} = |x|^{2<k>+N+a-3} dx` (radial density).
//!
//! Each half-line is split at `u = (2/a) x^a = 1`. On the inner piece the
//! substitution `x = x_s y^{1/D}` turns the density into `dy` and a tanh-sinh
//! rule in `y` absorbs every algebraic endpoint behaviour (`|x|^beta`,
//! singular symbols). On the outer piece a Gauss-Laguerre rule in
//! `v = u - 1` handles the `e^{-u}` decay of products of basis functions.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::{Geometry, Params};

/// Split point of the composite rule in the variable `u = (2/a) |x|^a`.
const SPLIT_U: f64 = 1.0;
/// Relative tolerance of the calibration identity.
pub const CALIBRATION_TOL: f64 = 1e-8;
/// Smallest node we are willing to place (avoids underflow of `x^{-a}`).
const SMALLEST_NODE: f64 = 1e-280;
/// Deepest tail (in decades of `y`) reached by the inner tanh-sinh rule; large
/// rules go this deep so that singular symbols `|xi|^{-gamma}` are resolved.
const INNER_DECADES_MAX: f64 = 60.0;
const INNER_DECADES_MIN: f64 = 18.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    params: Params,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    truncated: bool,
}

impl QuadratureRule {
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Strictly increasing, never containing 0.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// True if nodes beyond `r_max` were dropped.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Total mass of the rule (finite sum of the weights).
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i g(x_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// `sum_i w_i v_i` for values aligned with the nodes.
    pub fn sum(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// The closed form of `int e^{-(2/a)|x|^a} dmu_{k,a}`.
    pub fn calibration_target(params: &Params) -> f64 {
        let d = params.homogeneous_dim();
        let a = params.a;
        params.mass_factor() * (1.0 / a) * (a / 2.0).powf(d / a) * ln_gamma(d / a).exp()
    }

    /// Relative error of the calibration identity.
    pub fn calibration_error(&self) -> f64 {
        let a = self.params.a;
        let approx = self.integrate(|x| (-(2.0 / a) * x.abs().powf(a)).exp());
        let exact = Self::calibration_target(&self.params);
        ((approx - exact) / exact).abs()
    }
}

/// Builds the rule with `n_nodes` nodes in total (both half-lines in line mode).
///
/// `r_max = f64::INFINITY` keeps every node.
pub fn build_quadrature(params: &Params, n_nodes: usize, r_max: f64) -> Result<QuadratureRule> {
    if n_nodes < 16 {
        return Err(Error::QuadratureFailure(format!(
            "n_nodes = {n_nodes} is below the minimum of 16"
        )));
    }
    if n_nodes > 8192 {
        return Err(Error::QuadratureFailure(format!("n_nodes = {n_nodes} is too large")));
    }
    let a = params.a;
    if !(r_max > 0.0) || (-(2.0 / a) * r_max.powf(a)).exp() >= 1e-16 {
        return Err(Error::QuadratureFailure(format!(
            "R_max = {r_max} does not reach the e^(-(2/a)R^a) < 1e-16 tail"
        )));
    }
    let n_half = match params.geometry {
        Geometry::Line => {
            if !n_nodes.is_multiple_of(2) {
                return Err(Error::QuadratureFailure("line mode needs an even node count".into()));
            }
            n_nodes / 2
        }
        Geometry::Radial => n_nodes,
    };
    let n_inner = (n_half / 2).min((n_half / 3).max(32)).clamp(8, 160);
    let n_outer = n_half - n_inner;

    let d = params.homogeneous_dim();
    let mut half: Vec<(f64, f64)> = Vec::with_capacity(n_half);

    // inner piece: x = x_s y^{1/D}, density -> x_s^D / D dy
    let x_split = (a / 2.0 * SPLIT_U).powf(1.0 / a);
    let decades = (0.6 * n_inner as f64).clamp(INNER_DECADES_MIN, INNER_DECADES_MAX);
    let y_min = 10f64.powf(-decades).max((SMALLEST_NODE / x_split).powf(d)).min(1e-12);
    let scale = x_split.powf(d) / d;
    for (ln_y, w) in tanh_sinh_unit(n_inner, y_min) {
        let x = x_split * (ln_y / d).exp();
        half.push((x, scale * w));
    }

    // outer piece: u = 1 + v, Gauss-Laguerre in v
    let density_scale = (1.0 / a) * (a / 2.0).powf(d / a);
    for (v, ln_w) in gauss_laguerre(n_outer)? {
        let u = SPLIT_U + v;
        let x = (a / 2.0 * u).powf(1.0 / a);
        let w = (ln_w + v).exp() * density_scale * u.powf(d / a - 1.0);
        half.push((x, w));
    }

    let truncated = half.iter().any(|&(x, _)| x > r_max);
    half.retain(|&(x, w)| x <= r_max && w > 0.0 && w.is_finite());
    half.sort_by(|p, q| p.0.total_cmp(&q.0));

    let (nodes, weights) = match params.geometry {
        Geometry::Line => {
            let mut nodes: Vec<f64> = half.iter().rev().map(|&(x, _)| -x).collect();
            let mut weights: Vec<f64> = half.iter().rev().map(|&(_, w)| w).collect();
            nodes.extend(half.iter().map(|&(x, _)| x));
            weights.extend(half.iter().map(|&(_, w)| w));
            (nodes, weights)
        }
        Geometry::Radial => half.into_iter().unzip(),
    };

    if nodes.windows(2).any(|p| !(p[0] < p[1])) || nodes.contains(&0.0) {
        return Err(Error::QuadratureFailure("nodes are not strictly increasing".into()));
    }

    let rule = QuadratureRule {
        params: *params,
        nodes,
        weights,
        r_max,
        truncated,
    };
    let err = rule.calibration_error();
    if !(err < CALIBRATION_TOL) {
        return Err(Error::QuadratureFailure(format!(
            "calibration error {err:e} exceeds {CALIBRATION_TOL:e}"
        )));
    }
    Ok(rule)
}

/// Tanh-sinh rule on `(0, 1)` returning `(ln y, w)`; stops where the left tail
/// mass drops below `y_min`.
fn tanh_sinh_unit(n: usize, y_min: f64) -> Vec<(f64, f64)> {
    // y = 1/(1 + e^{-2s}), s = (pi/2) sinh t
    let t_lo = (y_min.ln() / std::f64::consts::PI).asinh();
    // 1 - y = e^{-2 s} stays above ~1e-15 so neighbouring nodes remain distinct
    let t_hi = (17.0 / FRAC_PI_2).asinh();
    let h = (t_hi - t_lo) / (n - 1) as f64;
    (0..n)
        .map(|j| {
            let t = t_lo + h * j as f64;
            let s = FRAC_PI_2 * t.sinh();
            let ln_y = if s >= 0.0 {
                -(-2.0 * s).exp().ln_1p()
            } else {
                2.0 * s - (2.0 * s).exp().ln_1p()
            };
            let e = (-2.0 * s.abs()).exp();
            let dy_ds = 2.0 * e / ((1.0 + e) * (1.0 + e));
            (ln_y, h * FRAC_PI_2 * t.cosh() * dy_ds)
        })
        .collect()
}

/// Gauss-Laguerre nodes and log-weights for `int_0^inf e^{-v} g(v) dv`.
///
/// Nodes come from the Golub-Welsch eigenproblem and are polished by Newton
/// steps on the orthonormal recurrence; weights use the Christoffel function
/// in log scale so that tiny weights keep full relative precision.
pub fn gauss_laguerre(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * i as f64 + 1.0
        } else if i + 1 == j || j + 1 == i {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    roots.sort_by(f64::total_cmp);

    let mut out = Vec::with_capacity(n);
    for mut x in roots {
        for _ in 0..8 {
            let (p, dp) = laguerre_value_and_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        if !(x > 0.0) {
            return Err(Error::QuadratureFailure("Gauss-Laguerre root left (0, inf)".into()));
        }
        out.push((x, -ln_christoffel_sum(n, x)));
    }
    Ok(out)
}

const RESCALE: f64 = 1e100;

/// Orthonormal Laguerre (alpha = 0) `p_n(x)` and `p_n'(x)`, up to a common scale.
fn laguerre_value_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for j in 0..n {
        let jf = j as f64;
        let p_next = ((x - (2.0 * jf + 1.0)) * p - jf * p_prev) / (jf + 1.0);
        let d_next = ((x - (2.0 * jf + 1.0)) * d + p - jf * d_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        if p.abs() > RESCALE || d.abs() > RESCALE {
            p /= RESCALE;
            p_prev /= RESCALE;
            d /= RESCALE;
            d_prev /= RESCALE;
        }
    }
    (p, d)
}

/// `ln sum_{j<n} p_j(x)^2` for orthonormal Laguerre polynomials (alpha = 0).
fn ln_christoffel_sum(n: usize, x: f64) -> f64 {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for j in 0..n - 1 {
        let jf = j as f64;
        let p_next = ((x - (2.0 * jf + 1.0)) * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
        if p.abs() > RESCALE {
            p /= RESCALE;
            p_prev /= RESCALE;
            sum /= RESCALE * RESCALE;
            ln_scale += RESCALE.ln();
        }
        sum += p * p;
    }
    sum.ln() + 2.0 * ln_scale
}
