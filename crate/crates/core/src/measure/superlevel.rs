//! Superlevel-set measures and the functionals built on them.
//!
//! For a symbol `psi` and exponent `theta > 0`,
//! `L_theta(psi) = sup_{t>0} t * mu{|psi| >= t}^theta`. The Paley functional
//! is `L_1`; the multiplier bound uses `theta = 1/p - 1/q`. Closed-form radial
//! symbols are evaluated exactly through the identity
//! `L_theta(psi) = L_1(|psi|^{1/theta})^theta`.

use serde::{Deserialize, Serialize};

use super::QuadratureRule;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::symbol::{MultiplierSymbol, RadialSymbol};

pub const T_GRID_LEN: usize = 400;
pub const T_GRID_MIN: f64 = 1e-6;
pub const T_GRID_MAX: f64 = 1e6;
/// Relative tolerance for deciding that a power exponent sits exactly on the
/// critical value `D`.
const CRITICAL_TOL: f64 = 1e-12;
/// Endpoint slope of `ln(t mu(t))` above which the numeric sup is declared divergent.
const DIVERGENCE_SLOPE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Superlevel {
    /// `+inf` when the set has infinite measure.
    pub measure: f64,
    /// True if the value came from a truncated grid rather than a closed form.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    /// `+inf` when unbounded.
    pub value: f64,
    pub exact: bool,
}

impl LevelValue {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `mu_{k,a}` of the ball of radius `r` (angular factor 1 in radial mode).
pub fn ball_measure(params: &Params, r: f64) -> f64 {
    if r == f64::INFINITY {
        return f64::INFINITY;
    }
    let d = params.homogeneous_dim();
    params.mass_factor() * r.powf(d) / d
}

/// `mu{xi : |psi(xi)| >= t}`.
pub fn superlevel_measure(rule: &QuadratureRule, psi: &MultiplierSymbol, t: f64) -> Result<Superlevel> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("level t = {t} must be positive")));
    }
    if let Some(r) = psi.as_radial() {
        return Ok(Superlevel {
            measure: radial_superlevel(rule.params(), &r, t),
            truncated: false,
        });
    }
    let values = sampled_abs(rule, psi);
    Ok(Superlevel {
        measure: values
            .iter()
            .zip(rule.weights())
            .filter(|(v, _)| **v >= t)
            .map(|(_, w)| w)
            .sum(),
        truncated: true,
    })
}

/// `M_psi = sup_t t * mu{psi >= t}`.
pub fn paley_functional(rule: &QuadratureRule, psi: &MultiplierSymbol) -> LevelValue {
    level_functional(rule, psi, 1.0)
}

/// `sup_t t * mu{|psi| >= t}^theta` for `theta >= 0`.
///
/// With `theta = 0` the value is `+inf` if some superlevel set has infinite
/// measure and the essential supremum of `|psi|` otherwise.
pub fn level_functional(rule: &QuadratureRule, psi: &MultiplierSymbol, theta: f64) -> LevelValue {
    if let Some(r) = psi.as_radial() {
        return LevelValue {
            value: radial_level(rule.params(), &r, theta),
            exact: true,
        };
    }
    LevelValue {
        value: numeric_level(rule, &sampled_abs(rule, psi), theta),
        exact: false,
    }
}

fn sampled_abs(rule: &QuadratureRule, psi: &MultiplierSymbol) -> Vec<f64> {
    rule.nodes().iter().map(|&x| psi.eval(x).abs()).collect()
}

fn radial_superlevel(params: &Params, r: &RadialSymbol, t: f64) -> f64 {
    let s = r.scale.abs();
    if s == 0.0 {
        return 0.0;
    }
    if r.gamma == 0.0 {
        return if t <= s { ball_measure(params, r.radius) } else { 0.0 };
    }
    let reach = (s / t).powf(1.0 / r.gamma);
    ball_measure(params, reach.min(r.radius))
}

/// Closed-form `sup_t t mu{psi >= t}` for `psi = s |xi|^{-gamma} 1{|xi| <= R}`.
fn radial_paley(params: &Params, r: &RadialSymbol) -> f64 {
    let s = r.scale.abs();
    if s == 0.0 {
        return 0.0;
    }
    let d = params.homogeneous_dim();
    let m = params.mass_factor();
    let critical = (r.gamma - d).abs() <= CRITICAL_TOL * d;
    if r.radius == f64::INFINITY {
        // t^{1 - D/gamma} is bounded only at gamma = D
        if critical {
            s * m / d
        } else {
            f64::INFINITY
        }
    } else if critical {
        s * m / d
    } else if r.gamma > d {
        f64::INFINITY
    } else {
        // maximum at the level where the ball constraint becomes active
        s * r.radius.powf(d - r.gamma) * m / d
    }
}

fn radial_level(params: &Params, r: &RadialSymbol, theta: f64) -> f64 {
    if r.scale == 0.0 {
        return 0.0;
    }
    if theta == 0.0 {
        // an infinite superlevel set exists unless the symbol is bounded with finite support
        return if r.gamma > 0.0 || r.radius == f64::INFINITY {
            f64::INFINITY
        } else {
            r.scale.abs()
        };
    }
    // homogeneous of degree one in the scale; factoring it out avoids
    // overflow of scale^{1/theta} for small theta
    let unit = RadialSymbol { scale: 1.0, ..*r };
    r.scale.abs() * radial_paley(params, &unit.abs_pow(1.0 / theta)).powf(theta)
}

/// Numeric sup over the log-spaced level grid plus the symbol's own levels.
fn numeric_level(rule: &QuadratureRule, values: &[f64], theta: f64) -> f64 {
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .copied()
        .zip(rule.weights().iter().copied())
        .filter(|(v, _)| *v > 0.0)
        .collect();
    if pairs.is_empty() {
        return 0.0;
    }
    if theta == 0.0 {
        return pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    }
    pairs.sort_by(|p, q| q.0.total_cmp(&p.0));
    // cumulative measure of {v >= level} as the level decreases
    let mut cum = Vec::with_capacity(pairs.len());
    let mut acc = 0.0;
    for &(_, w) in &pairs {
        acc += w;
        cum.push(acc);
    }
    let measure_at = |t: f64| -> f64 {
        // number of samples with v >= t
        let idx = pairs.partition_point(|p| p.0 >= t);
        if idx == 0 {
            0.0
        } else {
            cum[idx - 1]
        }
    };
    let g = |t: f64| t * measure_at(t).powf(theta);

    let ln_lo = T_GRID_MIN.ln();
    let step = (T_GRID_MAX.ln() - ln_lo) / (T_GRID_LEN - 1) as f64;
    let grid: Vec<f64> = (0..T_GRID_LEN).map(|i| (ln_lo + step * i as f64).exp()).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| g(t)).collect();

    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for &(v, _) in &pairs {
        best = best.max(g(v));
    }

    // divergence toward either end of the grid
    let slope = |i: usize, j: usize| -> Option<f64> {
        (vals[i] > 0.0 && vals[j] > 0.0).then(|| (vals[j].ln() - vals[i].ln()) / (grid[j].ln() - grid[i].ln()))
    };
    let n = T_GRID_LEN;
    if vals[n - 1] >= best {
        if let Some(s) = slope(n - 2, n - 1) {
            if s > DIVERGENCE_SLOPE {
                return f64::INFINITY;
            }
        }
    }
    if vals[0] >= best {
        if let Some(s) = slope(0, 1) {
            if s < -DIVERGENCE_SLOPE {
                return f64::INFINITY;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_quadrature;

    fn rule(k: f64, a: f64) -> QuadratureRule {
        build_quadrature(&Params::new(1, k, a).unwrap(), 256, f64::INFINITY).unwrap()
    }

    #[test]
    fn power_symbol_superlevel() {
        let r = rule(0.3, 1.7);
        let d = 2.0 * 0.3 + 1.7 - 1.0;
        let gamma = 1.3;
        let psi = MultiplierSymbol::power(gamma).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let s = superlevel_measure(&r, &psi, t).unwrap();
            let expected = 2.0 * t.powf(-d / gamma) / d;
            assert!(((s.measure - expected) / expected).abs() < 1e-14);
            assert!(!s.truncated);
        }
    }

    #[test]
    fn constant_symbol_is_unbounded() {
        let r = rule(0.0, 2.0);
        let one = MultiplierSymbol::identity();
        assert_eq!(superlevel_measure(&r, &one, 0.5).unwrap().measure, f64::INFINITY);
        assert_eq!(superlevel_measure(&r, &one, 1.5).unwrap().measure, 0.0);
        assert_eq!(paley_functional(&r, &one).value, f64::INFINITY);
    }

    #[test]
    fn indicator_ball() {
        let r = rule(0.5, 2.0);
        let psi = MultiplierSymbol::indicator(1.5).unwrap();
        let d = 2.0;
        let ball = 2.0 * 1.5f64.powf(d) / d;
        assert_eq!(superlevel_measure(&r, &psi, 1.0).unwrap().measure, ball);
        let m = paley_functional(&r, &MultiplierSymbol::indicator(1.0).unwrap());
        assert!((m.value - 2.0 / d).abs() < 1e-15);
    }

    #[test]
    fn paley_power_examples() {
        let r = rule(0.5, 2.0);
        let psi = MultiplierSymbol::power(2.0).unwrap();
        assert!((paley_functional(&r, &psi).value - 1.0).abs() < 1e-15);
        let psi = MultiplierSymbol::power(1.5).unwrap();
        assert_eq!(paley_functional(&r, &psi).value, f64::INFINITY);
        let psi = MultiplierSymbol::power(2.5).unwrap();
        assert_eq!(paley_functional(&r, &psi).value, f64::INFINITY);
    }

    #[test]
    fn paley_is_homogeneous() {
        let r = rule(0.2, 1.4);
        let d = r.params().homogeneous_dim();
        for psi in [
            MultiplierSymbol::power(d).unwrap(),
            MultiplierSymbol::indicator(2.0).unwrap(),
            MultiplierSymbol::power(0.5 * d).unwrap().times(MultiplierSymbol::indicator(3.0).unwrap()),
        ] {
            let base = paley_functional(&r, &psi).value;
            for c in [0.5, 3.0] {
                let scaled = paley_functional(&r, &psi.clone().scaled(c)).value;
                assert!((scaled - c * base).abs() <= 1e-13 * scaled);
            }
        }
    }

    #[test]
    fn numeric_matches_closed_form_for_truncated_power() {
        let r = rule(0.5, 2.0);
        // sampled copy of 1{|xi|<=2} |xi|^{-1}: closed form is R^{D-gamma} m / D = 2
        let closed = MultiplierSymbol::power(1.0).unwrap().times(MultiplierSymbol::indicator(2.0).unwrap());
        let nodes = r.nodes().to_vec();
        let values = nodes.iter().map(|&x| closed.eval(x)).collect();
        let sampled = MultiplierSymbol::Sampled(crate::symbol::SampledSymbol::new(nodes, values).unwrap());
        let exact = paley_functional(&r, &closed).value;
        assert!((exact - 2.0).abs() < 1e-14);
        let numeric = paley_functional(&r, &sampled);
        assert!(!numeric.exact);
        assert!((numeric.value - exact).abs() < 0.1 * exact, "{}", numeric.value);
    }

    #[test]
    fn theta_zero_convention() {
        let r = rule(0.5, 2.0);
        assert_eq!(level_functional(&r, &MultiplierSymbol::identity(), 0.0).value, f64::INFINITY);
        let ind = MultiplierSymbol::indicator(1.0).unwrap().scaled(0.7);
        assert_eq!(level_functional(&r, &ind, 0.0).value, 0.7);
    }

    #[test]
    fn superlevel_monotone_in_t() {
        let r = rule(0.3, 1.2);
        let psi = MultiplierSymbol::power(0.8).unwrap().times(MultiplierSymbol::indicator(2.5).unwrap());
        let mut last = f64::INFINITY;
        for i in 0..60 {
            let t = 1e-3 * 1.3f64.powi(i);
            let m = superlevel_measure(&r, &psi, t).unwrap().measure;
            assert!(m <= last);
            last = m;
        }
    }
}
