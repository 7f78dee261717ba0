//! Picard iteration on the integral forms
//! `u(t) = u0 + int_0^t |Bu|^p` and
//! `u(t) = u0 + t u1 + int_0^t (t - s) b(s) |Bu(s)|^p ds`
//! on a uniform time grid with the composite trapezoid rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{heat_tstar, CauchyProblem, ProblemKind};
use crate::error::{Error, Result};
use crate::measure::lp_norm_values;
use crate::symbol::MultiplierSymbol;
use crate::transform::{CVector, TransformOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub n_time: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n_time: 128,
            max_iter: 100,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionPath {
    pub kind: ProblemKind,
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<CVector>,
    /// `||u(t_j)||_2` per stored time.
    pub norms: Vec<f64>,
    /// Fixed-point residual plus the accumulated projection defect.
    pub residual: f64,
    pub fixed_point_residual: f64,
    pub projection_defect: f64,
    pub iterations: usize,
    pub in_sc: bool,
    pub t_star: f64,
    /// False when the horizon exceeds `T*`.
    pub guaranteed: bool,
    /// Successive iterate differences (sup over time of the L2 norm).
    pub diffs: Vec<f64>,
    /// Ratios of successive differences.
    pub contraction: Vec<f64>,
}

fn is_identity(h: &MultiplierSymbol) -> bool {
    h.as_radial()
        .is_some_and(|r| r.scale == 1.0 && r.gamma == 0.0 && r.radius == f64::INFINITY)
}

/// `P |B u|^p` and the absolute L2 projection defect it incurred.
fn nonlinearity(t: &TransformOperator, symbol: &MultiplierSymbol, p: f64, u: &CVector) -> Result<(CVector, f64)> {
    let rule = t.rule();
    let mut defect = 0.0;
    let bu = if is_identity(symbol) {
        t.synthesize(u)
    } else {
        let ff = t.synthesize(&t.forward_coeffs(u)?);
        let hf: Vec<Complex64> = ff.iter().zip(rule.nodes()).map(|(v, &xi)| v * symbol.eval(xi)).collect();
        let proj = t.project(&hf)?;
        defect += proj.residual * lp_norm_values(rule, &hf, 2.0)?;
        t.synthesize(&t.inverse_coeffs(&proj.coeffs)?)
    };
    let g: Vec<Complex64> = bu.iter().map(|v| Complex64::new(v.norm().powf(p), 0.0)).collect();
    let proj = t.project(&g)?;
    defect += proj.residual * lp_norm_values(rule, &g, 2.0)?;
    Ok((proj.coeffs, defect))
}

struct Grid {
    times: Vec<f64>,
    h: f64,
}

impl Grid {
    fn new(horizon: f64, n_time: usize) -> Self {
        let h = horizon / n_time as f64;
        Self {
            times: (0..=n_time).map(|j| j as f64 * h).collect(),
            h,
        }
    }

    /// Trapezoid weights of `int_0^{t_j} g` as a function of the node index.
    fn weight(&self, i: usize, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else if i == 0 || i == j {
            0.5 * self.h
        } else {
            self.h
        }
    }
}

/// One application of the integral map, with the integrated projection defect.
fn picard_map(t: &TransformOperator, prob: &CauchyProblem, grid: &Grid, current: &[CVector]) -> Result<(Vec<CVector>, f64)> {
    let n = grid.times.len();
    let zero = CVector::zeros(prob.u0.len());
    let b_nodes: Vec<f64> = grid.times.iter().map(|&s| prob.b.node_value(s, grid.h)).collect();
    let skip = prob.kind == ProblemKind::Wave && prob.b.is_zero();
    let mut terms = Vec::with_capacity(n);
    let mut defects = Vec::with_capacity(n);
    for u in current {
        if skip {
            terms.push(zero.clone());
            defects.push(0.0);
        } else {
            let (c, d) = nonlinearity(t, &prob.symbol, prob.p_exp, u)?;
            terms.push(c);
            defects.push(d);
        }
    }
    let mut next = Vec::with_capacity(n);
    let mut worst_defect: f64 = 0.0;
    match prob.kind {
        ProblemKind::Heat => {
            let mut acc = zero.clone();
            let mut acc_defect = 0.0;
            for j in 0..n {
                if j > 0 {
                    let w = 0.5 * grid.h;
                    acc += (&terms[j - 1] + &terms[j]) * Complex64::new(w, 0.0);
                    acc_defect += w * (defects[j - 1] + defects[j]);
                }
                next.push(&prob.u0 + &acc);
                worst_defect = worst_defect.max(acc_defect);
            }
        }
        ProblemKind::Wave => {
            let u1 = prob.u1.as_ref().expect("validated wave problem");
            for (j, &tj) in grid.times.iter().enumerate() {
                let mut acc = &prob.u0 + u1 * Complex64::new(tj, 0.0);
                let mut acc_defect = 0.0;
                for i in 0..j {
                    let w = grid.weight(i, j) * (tj - grid.times[i]) * b_nodes[i];
                    if w != 0.0 {
                        acc += &terms[i] * Complex64::new(w, 0.0);
                        acc_defect += w.abs() * defects[i];
                    }
                }
                next.push(acc);
                worst_defect = worst_defect.max(acc_defect);
            }
        }
    }
    Ok((next, worst_defect))
}

fn sup_diff(a: &[CVector], b: &[CVector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Solves either kind of problem.
pub fn solve(t: &TransformOperator, prob: &CauchyProblem, opts: &SolverOptions) -> Result<SolutionPath> {
    prob.validate()?;
    if prob.u0.len() != t.len() {
        return Err(Error::ShapeMismatch {
            expected: t.len(),
            got: prob.u0.len(),
        });
    }
    if opts.n_time == 0 || opts.max_iter == 0 {
        return Err(Error::InvalidArgument("n_time and max_iter must be positive".into()));
    }
    let t_star = prob.tstar()?;
    let guaranteed = prob.horizon <= t_star;
    if !guaranteed && !prob.allow_beyond_tstar {
        return Err(Error::InvalidArgument(format!(
            "T = {} exceeds T* = {t_star}; allow it explicitly to run without guarantee",
            prob.horizon
        )));
    }

    let grid = Grid::new(prob.horizon, opts.n_time);
    let mut current: Vec<CVector> = match prob.kind {
        ProblemKind::Heat => vec![prob.u0.clone(); grid.times.len()],
        ProblemKind::Wave => {
            let u1 = prob.u1.as_ref().expect("validated wave problem");
            grid.times.iter().map(|&s| &prob.u0 + u1 * Complex64::new(s, 0.0)).collect()
        }
    };
    let mut diffs = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let (next, _) = picard_map(t, prob, &grid, &current)?;
        let d = sup_diff(&next, &current);
        diffs.push(d);
        current = next;
        if !d.is_finite() {
            break;
        }
        if d < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: diffs.len(),
            last_diff: diffs.last().copied().unwrap_or(f64::NAN),
        });
    }

    let (image, projection_defect) = picard_map(t, prob, &grid, &current)?;
    let fixed_point_residual = sup_diff(&image, &current);
    let norms: Vec<f64> = current.iter().map(|c| c.norm()).collect();
    let sup = norms.iter().copied().fold(0.0, f64::max);
    let slack = 1.0 + 1e-12;
    let in_sc = match prob.kind {
        ProblemKind::Heat => sup <= prob.c_set * prob.u0.norm() * slack,
        ProblemKind::Wave => {
            let u1 = prob.u1.as_ref().map_or(0.0, |v| v.norm());
            let bound = prob.c_set * (prob.u0.norm_squared() + prob.horizon * prob.horizon * u1 * u1);
            sup * sup <= bound * slack
        }
    };
    let contraction = diffs
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    Ok(SolutionPath {
        kind: prob.kind,
        times: grid.times,
        states: current,
        norms,
        residual: fixed_point_residual + projection_defect,
        fixed_point_residual,
        projection_defect,
        iterations: diffs.len(),
        in_sc,
        t_star,
        guaranteed,
        diffs,
        contraction,
    })
}

pub fn solve_heat(t: &TransformOperator, prob: &CauchyProblem, opts: &SolverOptions) -> Result<SolutionPath> {
    if prob.kind != ProblemKind::Heat {
        return Err(Error::InvalidArgument("expected a heat problem".into()));
    }
    solve(t, prob, opts)
}

pub fn solve_wave(t: &TransformOperator, prob: &CauchyProblem, opts: &SolverOptions) -> Result<SolutionPath> {
    if prob.kind != ProblemKind::Wave {
        return Err(Error::InvalidArgument("expected a wave problem".into()));
    }
    solve(t, prob, opts)
}

/// Default heat horizon: `0.9 T*`.
pub fn auto_heat_horizon(c: f64, p_exp: f64, norm_u0: f64) -> f64 {
    0.9 * heat_tstar(c, p_exp, norm_u0)
}
