use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use super::io::{emit, emit_json, num, read_samples, resample, to_json, Table};
use super::{BasisArgs, KernelModeArg, ParamArgs, PdeArgs, Which};
use crate::error::{Error, Result};
use crate::inequalities::{conjugate, hormander_bound, hy_ratio, hyp_ratio, paley_ratio, Ratio};
use crate::measure::{build_quadrature, paley_functional, superlevel_measure, GridFunction};
use crate::multiplier::empirical_opnorm;
use crate::par::Execution;
use crate::params::{validate, Params};
use crate::pde::{
    auto_heat_horizon, parse_initial_data, solve, wave_self_consistent_tstar, CauchyProblem, SolutionPath,
    SolverOptions, TimeCoefficient,
};
use crate::suite::{self, TestFamily, TestFunction};
use crate::symbol::MultiplierSymbol;
use crate::transform::{kernel_bound_estimate, kernel_eval, kernel_normalized, KernelMode, TransformOperator};

fn operator(params: &Params, basis: &BasisArgs) -> Result<TransformOperator> {
    match basis.nodes {
        Some(n) => TransformOperator::new(params, basis.n_basis, n),
        None => TransformOperator::with_default_nodes(params, basis.n_basis),
    }
}

pub fn check_params(dim: usize, k: f64, a: f64) -> Result<()> {
    emit_json(&validate(dim, k, a)?)
}

#[derive(Serialize)]
struct MeasureReport {
    params: Params,
    nodes: usize,
    total_mass: f64,
    calibration_error: f64,
    superlevel: Option<f64>,
    superlevel_truncated: Option<bool>,
    paley: Option<f64>,
    paley_exact: Option<bool>,
}

pub fn measure(args: &ParamArgs, nodes: usize, psi: Option<&str>, t: Option<f64>, paley: bool) -> Result<()> {
    let params = args.params()?;
    let rule = build_quadrature(&params, nodes, f64::INFINITY)?;
    let mut report = MeasureReport {
        params,
        nodes: rule.len(),
        total_mass: rule.total_mass(),
        calibration_error: rule.calibration_error(),
        superlevel: None,
        superlevel_truncated: None,
        paley: None,
        paley_exact: None,
    };
    if (t.is_some() || paley) && psi.is_none() {
        return Err(Error::InvalidArgument("--t and --paley need --psi".into()));
    }
    if let Some(spec) = psi {
        let psi = MultiplierSymbol::parse(spec)?;
        if let Some(t) = t {
            let s = superlevel_measure(&rule, &psi, t)?;
            report.superlevel = Some(s.measure);
            report.superlevel_truncated = Some(s.truncated);
        }
        if paley {
            let m = paley_functional(&rule, &psi);
            report.paley = Some(m.value);
            report.paley_exact = Some(m.exact);
        }
    }
    emit_json(&report)
}

pub fn oscillator(args: &ParamArgs, basis: &BasisArgs, dump: Option<&Path>) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let b = t.basis();
    let mut table = Table::new(&["n", "parity", "eigenvalue"]);
    for (n, l) in b.eigvals().iter().enumerate() {
        table.push(vec![n.to_string(), format!("{:?}", b.parity(n)).to_lowercase(), num(*l)]);
    }
    emit(None, &table.to_csv()?)?;
    eprintln!("asymmetry {:e}, gram defect {:e}", b.asymmetry(), b.gram_defect());
    if let Some(path) = dump {
        let m = b.operator();
        let mut out = Table::new(&["row", "col", "value"]);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.push(vec![i.to_string(), j.to_string(), num(m[(i, j)])]);
            }
        }
        emit(Some(path), &out.to_csv()?)?;
    }
    Ok(())
}

pub fn transform(args: &ParamArgs, basis: &BasisArgs, input: &Path, output: Option<&Path>, inverse: bool) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let samples = read_samples(input)?;
    let rule = Arc::clone(t.rule());
    let f = GridFunction::new(Arc::clone(&rule), resample(&samples, rule.nodes()))?;
    let g = if inverse { t.inverse(&f)? } else { t.forward(&f)? };
    let mut table = Table::new(&["node", "re", "im"]);
    for (x, v) in rule.nodes().iter().zip(g.values()) {
        table.push(vec![num(*x), num(v.re), num(v.im)]);
    }
    emit(output, &table.to_csv()?)
}

#[derive(Serialize)]
struct KernelReport {
    xi: f64,
    x: f64,
    re: f64,
    im: f64,
    normalized_re: f64,
    normalized_im: f64,
    truncation: f64,
}

pub fn kernel(args: &ParamArgs, basis: &BasisArgs, xi: f64, x: f64, mode: KernelModeArg, eps: f64) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let mode = match mode {
        KernelModeArg::Abel => {
            if !(eps > 0.0) {
                return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
            }
            KernelMode::Abel { eps }
        }
        KernelModeArg::Extrapolated => KernelMode::Extrapolated,
    };
    let raw = kernel_eval(&t, xi, x, mode);
    let b = kernel_normalized(&t, xi, x, mode);
    let report = KernelReport {
        xi,
        x,
        re: raw.value.re,
        im: raw.value.im,
        normalized_re: b.re,
        normalized_im: b.im,
        truncation: raw.truncation,
    };
    emit_json(&report)
}

pub struct VerifyArgs {
    pub params: ParamArgs,
    pub basis: BasisArgs,
    pub which: Which,
    pub p: f64,
    pub b: Option<f64>,
    pub psi: Option<String>,
    pub suite: String,
    pub seed: u64,
    pub kernel_bound: Option<f64>,
    pub output: Option<PathBuf>,
}

fn suite_functions(t: &TransformOperator, name: &str, seed: u64) -> Result<Vec<TestFunction>> {
    if name == "default" {
        return suite::default_suite(t, seed);
    }
    let mut out = Vec::new();
    for fam in TestFamily::parse(name)? {
        out.extend(suite::family(t, fam, suite::FAMILY_SIZE, seed)?);
    }
    Ok(out)
}

pub fn verify(v: &VerifyArgs) -> Result<()> {
    let params = v.params.params()?;
    let t = operator(&params, &v.basis)?;
    let psi = || -> Result<MultiplierSymbol> {
        let spec = v.psi.as_deref().ok_or_else(|| Error::InvalidArgument("--psi is required".into()))?;
        MultiplierSymbol::parse(spec)
    };
    let fs = suite_functions(&t, &v.suite, v.seed)?;
    let (b, ratios): (f64, Vec<Ratio>) = match v.which {
        Which::Paley => {
            let psi = psi()?;
            (v.p, fs.iter().map(|f| paley_ratio(&t, &f.coeffs, &psi, v.p)).collect::<Result<_>>()?)
        }
        Which::Hy => {
            let m = match v.kernel_bound {
                Some(m) => m,
                None => kernel_bound_estimate(&params, Execution::Parallel)?,
            };
            (conjugate(v.p), fs.iter().map(|f| hy_ratio(&t, &f.coeffs, v.p, m)).collect::<Result<_>>()?)
        }
        Which::Hyp => {
            let psi = psi()?;
            let b = v.b.ok_or_else(|| Error::InvalidArgument("--b is required for hyp".into()))?;
            (b, fs.iter().map(|f| hyp_ratio(&t, &f.coeffs, &psi, v.p, b)).collect::<Result<_>>()?)
        }
    };
    let mut table = Table::new(&["function", "p", "b", "lhs", "rhs_core", "ratio"]);
    for (f, r) in fs.iter().zip(ratios) {
        table.push(vec![f.label.clone(), num(v.p), num(b), num(r.lhs), num(r.rhs_core), num(r.ratio)]);
    }
    emit(v.output.as_deref(), &table.to_csv()?)
}

#[derive(Serialize)]
struct BoundReport {
    symbol: String,
    p: f64,
    q: f64,
    /// `null` when unbounded.
    value: f64,
    bounded: bool,
    exact: bool,
}

pub fn bound(args: &ParamArgs, h: &str, p: f64, q: f64, nodes: usize) -> Result<()> {
    let params = args.params()?;
    let rule = build_quadrature(&params, nodes, f64::INFINITY)?;
    let h = MultiplierSymbol::parse(h)?;
    let v = hormander_bound(&rule, &h, p, q)?;
    let report = BoundReport {
        symbol: h.to_string(),
        p,
        q,
        value: v.value,
        bounded: v.is_finite(),
        exact: v.exact,
    };
    emit_json(&report)
}

#[allow(clippy::too_many_arguments)]
pub fn opnorm(args: &ParamArgs, basis: &BasisArgs, h: &str, p: f64, q: f64, suite: &str, seed: u64, samples: usize) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let h = MultiplierSymbol::parse(h)?;
    let families = TestFamily::parse(suite)?;
    let r = empirical_opnorm(&t, &h, p, q, &families, samples, seed, Execution::Parallel)?;
    emit_json(&r)
}

#[derive(Serialize)]
struct PdeDiagnostics {
    kind: crate::pde::ProblemKind,
    horizon: f64,
    #[serde(rename = "T_star")]
    t_star: f64,
    guaranteed: bool,
    residual: f64,
    fixed_point_residual: f64,
    projection_defect: f64,
    iterations: usize,
    #[serde(rename = "in_Sc")]
    in_sc: bool,
    contraction: Vec<f64>,
}

fn emit_path(pde: &PdeArgs, horizon: f64, s: &SolutionPath) -> Result<()> {
    let mut table = Table::new(&["t", "norm"]);
    for (t, n) in s.times.iter().zip(&s.norms) {
        table.push(vec![num(*t), num(*n)]);
    }
    emit(pde.output.as_deref(), &table.to_csv()?)?;
    let diag = PdeDiagnostics {
        kind: s.kind,
        horizon,
        t_star: s.t_star,
        guaranteed: s.guaranteed,
        residual: s.residual,
        fixed_point_residual: s.fixed_point_residual,
        projection_defect: s.projection_defect,
        iterations: s.iterations,
        in_sc: s.in_sc,
        contraction: s.contraction.clone(),
    };
    let json = to_json(&diag)?;
    match &pde.diagnostics {
        Some(p) => emit(Some(p), &json),
        None => {
            eprintln!("{json}");
            Ok(())
        }
    }
}

fn horizon(spec: &str, auto: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if spec.trim() == "auto" {
        return auto();
    }
    spec.trim().parse::<f64>().map_err(|_| Error::InvalidSpec {
        spec: spec.to_string(),
        reason: "expected a number or auto".into(),
    })
}

fn options(pde: &PdeArgs) -> SolverOptions {
    SolverOptions {
        n_time: pde.n_time,
        max_iter: pde.max_iter,
        tol: pde.tol,
    }
}

pub fn heat(args: &ParamArgs, basis: &BasisArgs, pde: &PdeArgs) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let u0 = parse_initial_data(&pde.u0, &t)?;
    let h = MultiplierSymbol::parse(&pde.h)?;
    let horizon = horizon(&pde.horizon, || Ok(auto_heat_horizon(pde.c, pde.p, u0.norm())))?;
    let mut prob = CauchyProblem::heat(u0, h, pde.p, pde.c, horizon)?;
    if pde.force {
        prob = prob.allowing_beyond_tstar();
    }
    let s = solve(&t, &prob, &options(pde))?;
    emit_path(pde, horizon, &s)
}

pub fn wave(args: &ParamArgs, basis: &BasisArgs, pde: &PdeArgs, b: &str, u1: &str) -> Result<()> {
    let params = args.params()?;
    let t = operator(&params, basis)?;
    let u0 = parse_initial_data(&pde.u0, &t)?;
    let u1 = parse_initial_data(u1, &t)?;
    let b = TimeCoefficient::parse(b)?;
    let h = MultiplierSymbol::parse(&pde.h)?;
    let horizon = horizon(&pde.horizon, || {
        let ts = wave_self_consistent_tstar(pde.c, pde.p, &b, u0.norm(), u1.norm())?;
        if !ts.is_finite() {
            return Err(Error::InvalidArgument("T* is unbounded; pass an explicit --T".into()));
        }
        Ok(0.9 * ts)
    })?;
    let mut prob = CauchyProblem::wave(u0, u1, b, h, pde.p, pde.c, horizon)?;
    if pde.force {
        prob = prob.allowing_beyond_tstar();
    }
    let s = solve(&t, &prob, &options(pde))?;
    emit_path(pde, horizon, &s)
}
