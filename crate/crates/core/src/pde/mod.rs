//! Picard solvers for `u_t = |Bu|^p` and `u_tt = b(t) |Bu|^p`, their
//! closed-form existence times, and the small-data global conditions.

mod data;
mod solver;

use serde::{Deserialize, Serialize};

pub use data::{parse_initial_data, TimeCoefficient};
pub use solver::{auto_heat_horizon, solve, solve_heat, solve_wave, SolutionPath, SolverOptions};

use crate::error::{Error, Result};
use crate::symbol::MultiplierSymbol;
use crate::transform::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Heat,
    Wave,
}

#[derive(Debug, Clone)]
pub struct CauchyProblem {
    pub kind: ProblemKind,
    /// Initial state in basis coordinates.
    pub u0: CVector,
    /// Initial velocity (wave only).
    pub u1: Option<CVector>,
    /// Time coefficient of the wave nonlinearity; ignored for heat.
    pub b: TimeCoefficient,
    pub p_exp: f64,
    pub symbol: MultiplierSymbol,
    pub horizon: f64,
    pub c_set: f64,
    /// Allow horizons beyond `T*`; such runs carry no existence guarantee.
    pub allow_beyond_tstar: bool,
}

impl CauchyProblem {
    pub fn heat(u0: CVector, symbol: MultiplierSymbol, p_exp: f64, c_set: f64, horizon: f64) -> Result<Self> {
        let prob = Self {
            kind: ProblemKind::Heat,
            u0,
            u1: None,
            b: TimeCoefficient::Constant(1.0),
            p_exp,
            symbol,
            horizon,
            c_set,
            allow_beyond_tstar: false,
        };
        prob.validate()?;
        Ok(prob)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn wave(
        u0: CVector,
        u1: CVector,
        b: TimeCoefficient,
        symbol: MultiplierSymbol,
        p_exp: f64,
        c_set: f64,
        horizon: f64,
    ) -> Result<Self> {
        let prob = Self {
            kind: ProblemKind::Wave,
            u0,
            u1: Some(u1),
            b,
            p_exp,
            symbol,
            horizon,
            c_set,
            allow_beyond_tstar: false,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn allowing_beyond_tstar(mut self) -> Self {
        self.allow_beyond_tstar = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_exp > 1.0) {
            return Err(Error::InvalidArgument(format!("p = {} must exceed 1", self.p_exp)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("T = {} must be positive", self.horizon)));
        }
        if !(self.c_set >= 1.0) {
            return Err(Error::InvalidArgument(format!("c = {} must be at least 1", self.c_set)));
        }
        if self.kind == ProblemKind::Wave {
            match &self.u1 {
                None => return Err(Error::InvalidArgument("wave problems need u1".into())),
                Some(u1) if u1.len() != self.u0.len() => {
                    return Err(Error::ShapeMismatch {
                        expected: self.u0.len(),
                        got: u1.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// `T*` of this problem at its own horizon.
    pub fn tstar(&self) -> Result<f64> {
        match self.kind {
            ProblemKind::Heat => Ok(heat_tstar(self.c_set, self.p_exp, self.u0.norm())),
            ProblemKind::Wave => {
                let u1 = self.u1.as_ref().map_or(0.0, |v| v.norm());
                Ok(wave_tstar(self.c_set, self.p_exp, self.b.l2_norm(self.horizon)?, self.u0.norm(), u1))
            }
        }
    }
}

/// `sqrt(c^2 - 1) / (c^p ||u0||)`.
pub fn heat_tstar(c: f64, p_exp: f64, norm_u0: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    (c * c - 1.0).sqrt() / (c.powf(p_exp) * norm_u0)
}

/// `min_i ((c-1) / (||b||^2 c^p ||u_i||^{2p-2}))^{1/3}`; a zero norm removes its branch.
pub fn wave_tstar(c: f64, p_exp: f64, b_l2_norm: f64, norm_u0: f64, norm_u1: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    let branch = |n: f64| {
        let den = b_l2_norm * b_l2_norm * c.powf(p_exp) * n.powf(2.0 * p_exp - 2.0);
        if den == 0.0 {
            f64::INFINITY
        } else {
            ((c - 1.0) / den).cbrt()
        }
    };
    branch(norm_u0).min(branch(norm_u1))
}

/// Largest `T` with `T <= T*(||b||_{L^2(0,T)})`, by bisection.
pub fn wave_self_consistent_tstar(c: f64, p_exp: f64, b: &TimeCoefficient, norm_u0: f64, norm_u1: f64) -> Result<f64> {
    let gap = |t: f64| -> Result<f64> { Ok(wave_tstar(c, p_exp, b.l2_norm(t)?, norm_u0, norm_u1) - t) };
    let mut hi = 1.0;
    let mut grown = 0;
    while gap(hi)? > 0.0 {
        hi *= 2.0;
        grown += 1;
        if grown > 200 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallDataReport {
    pub gamma: f64,
    pub gamma0: f64,
    pub p_exp: f64,
    pub gamma_tilde: f64,
    pub gamma_above_three_halves: bool,
    pub gamma0_in_range: bool,
    pub gamma_tilde_negative: bool,
    pub smallness: bool,
    /// Largest `||u0||` meeting the smallness condition at this `T`.
    pub max_norm_u0: f64,
    pub pass: bool,
}

/// Conditions for global existence with `||b||_{L^2(0,T)} <= c T^{-gamma}`.
pub fn global_smalldata_check(gamma: f64, p_exp: f64, gamma0: f64, horizon: f64, c: f64, norm_u0: f64) -> SmallDataReport {
    let gamma_tilde = 3.0 - 2.0 * gamma + gamma0 * p_exp;
    let gamma_above_three_halves = gamma > 1.5;
    let gamma0_in_range = gamma0 > 0.0 && gamma0 < (2.0 * gamma - 3.0) / p_exp;
    let gamma_tilde_negative = gamma_tilde < 0.0;
    let power = -gamma_tilde + gamma0;
    let smallness = c.powf(p_exp) * norm_u0.powf(2.0 * p_exp - 2.0) <= c * horizon.powf(power);
    let max_norm_u0 = (c.powf(1.0 - p_exp) * horizon.powf(power)).powf(1.0 / (2.0 * p_exp - 2.0));
    SmallDataReport {
        gamma,
        gamma0,
        p_exp,
        gamma_tilde,
        gamma_above_three_halves,
        gamma0_in_range,
        gamma_tilde_negative,
        smallness,
        max_norm_u0,
        pass: gamma_above_three_halves && gamma0_in_range && gamma_tilde_negative && smallness,
    }
}
