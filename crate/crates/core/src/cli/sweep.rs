//! Config-driven verification sweeps with deterministic reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::io::{num, Table};
use crate::error::{Error, Result};
use crate::inequalities::{conjugate, hormander_bound, hy_ratio, hyp_ratio, paley_ratio, Ratio};
use crate::multiplier::{verify_multiplier_theorem, VerifyOptions};
use crate::par::{self, Execution};
use crate::params::{Geometry, Params};
use crate::suite::{self, TestFamily};
use crate::symbol::MultiplierSymbol;
use crate::transform::{kernel_bound_estimate, CVector, TransformOperator};

/// Weight spec standing for `|xi|^{-D}`.
const MATCHED: &str = "matched";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    #[serde(rename = "N", default = "one")]
    pub dim: usize,
    pub k: f64,
    pub a: f64,
    #[serde(default)]
    pub radial: bool,
}

fn one() -> usize {
    1
}

impl ParamSpec {
    pub fn params(&self) -> Result<Params> {
        let geometry = if self.radial || self.dim > 1 { Geometry::Radial } else { Geometry::Line };
        Params::with_geometry(self.dim, self.k, self.a, geometry)
    }

    pub fn key(&self) -> String {
        let geom = if self.radial || self.dim > 1 { "radial" } else { "line" };
        format!("N{}_k{}_a{}_{geom}", self.dim, self.k, self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub unitarity: f64,
    pub ground_state: f64,
    pub calibration: f64,
    pub plancherel: f64,
    /// Allowed excess of a Hausdorff-Young ratio over 1.
    pub hy_slack: f64,
    /// Largest allowed `max / median` ratio within one Paley or HYP case.
    pub uniformity: f64,
    pub multiplier_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-8,
            ground_state: 1e-8,
            calibration: 1e-8,
            plancherel: 1e-8,
            hy_slack: 1e-2,
            uniformity: 10.0,
            multiplier_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: Vec<ParamSpec>,
    pub n_basis: usize,
    pub nodes: Option<usize>,
    /// Exponents `p` for the Hausdorff-Young, Paley, HYP and multiplier cases.
    pub p_values: Vec<f64>,
    /// HYP exponents; those outside `[p, p']` are skipped.
    pub hyp_b: Vec<f64>,
    /// Paley/HYP weights; `matched` means `|xi|^{-D}`.
    pub psi: Vec<String>,
    /// Target exponents for the matched power multipliers.
    pub q_values: Vec<f64>,
    /// Extra symbols whose bound `H` is tabulated at every `(p, q)`.
    pub symbols: Vec<String>,
    /// Operator-norm test families (`default`, `gaussians`, ...).
    pub suite: String,
    pub opnorm_samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Vec::new(),
            n_basis: 32,
            nodes: None,
            p_values: Vec::new(),
            hyp_b: Vec::new(),
            psi: Vec::new(),
            q_values: Vec::new(),
            symbols: Vec::new(),
            suite: "default".into(),
            opnorm_samples: 16,
            seed: suite::DEFAULT_SEED,
            output_dir: PathBuf::from("sweep-out"),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every spec must parse; parameter admissibility is checked per case.
    pub fn validate(&self) -> Result<()> {
        for s in self.psi.iter().filter(|s| s.as_str() != MATCHED) {
            MultiplierSymbol::parse(s)?;
        }
        for s in &self.symbols {
            MultiplierSymbol::parse(s)?;
        }
        TestFamily::parse(&self.suite)?;
        if self.n_basis == 0 {
            return Err(Error::InvalidArgument("n_basis must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub family: String,
    pub key: String,
    pub pass: bool,
    /// Headline number of the case (defect, ratio, ...), absent on error.
    pub metric: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub cases: usize,
    pub passed: usize,
    pub max_metric: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub case_total: usize,
    pub pass_total: usize,
    pub families: BTreeMap<String, FamilySummary>,
    pub failures: Vec<String>,
    pub errors: BTreeMap<String, String>,
    /// Scalar regression values keyed by case.
    pub fixtures: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bundle {
    /// File name to CSV contents.
    pub files: BTreeMap<String, String>,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl Bundle {
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)? + "\n")
    }
}

/// Output of one parameter set, before merging.
#[derive(Default)]
struct Partial {
    rows: BTreeMap<&'static str, Vec<Vec<String>>>,
    cases: Vec<CaseRecord>,
    fixtures: Vec<(String, f64)>,
}

impl Partial {
    fn record(&mut self, family: &'static str, key: String, outcome: Result<(bool, f64, Vec<String>)>, width: usize) {
        let (pass, metric, error, mut row) = match outcome {
            Ok((pass, metric, row)) => (pass, Some(metric), None, row),
            Err(e) => (false, None, Some(e), vec![String::new(); width]),
        };
        let status = match &error {
            None if pass => "pass".to_string(),
            None => "fail".to_string(),
            Some(e) => e.kind().to_string(),
        };
        let mut full = vec![key.clone()];
        full.append(&mut row);
        full.push(status);
        self.rows.entry(family).or_default().push(full);
        self.cases.push(CaseRecord {
            family: family.to_string(),
            key,
            pass,
            metric,
            error: error.map(|e| e.to_string()),
        });
    }
}

const HEADERS: [(&str, &[&str]); 8] = [
    ("unitarity", &["case", "defect", "status"]),
    ("ground_state", &["case", "fixed_point_defect", "eigenvalue_error", "status"]),
    ("calibration", &["case", "nodes", "relative_error", "status"]),
    ("hy", &["case", "p", "kernel_bound", "max_ratio", "median_ratio", "status"]),
    ("paley", &["case", "psi", "p", "max_ratio", "median_ratio", "status"]),
    ("hyp", &["case", "psi", "p", "b", "max_ratio", "median_ratio", "status"]),
    ("multiplier", &["case", "symbol", "p", "q", "bound", "max_ratio", "ratio_to_bound", "status"]),
    ("bound", &["case", "symbol", "p", "q", "bound", "exact", "status"]),
];

fn width(family: &str) -> usize {
    HEADERS.iter().find(|(f, _)| *f == family).map_or(0, |(_, h)| h.len() - 2)
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn ratios(rs: Result<Vec<Ratio>>) -> Result<Vec<f64>> {
    Ok(rs?.into_iter().map(|r| r.ratio).collect())
}

fn psi_symbol(spec: &str, params: &Params) -> Result<MultiplierSymbol> {
    if spec == MATCHED {
        MultiplierSymbol::power(params.homogeneous_dim())
    } else {
        MultiplierSymbol::parse(spec)
    }
}

fn run_params(cfg: &RunConfig, spec: &ParamSpec) -> Partial {
    let mut out = Partial::default();
    let key = spec.key();
    let tol = &cfg.tolerances;
    let built = spec.params().and_then(|p| {
        let t = match cfg.nodes {
            Some(n) => TransformOperator::new(&p, cfg.n_basis, n)?,
            None => TransformOperator::with_default_nodes(&p, cfg.n_basis)?,
        };
        Ok((p, t))
    });
    let (params, t) = match built {
        Ok(v) => v,
        Err(e) => {
            out.record("unitarity", key, Err(e), width("unitarity"));
            return out;
        }
    };

    let defect = t.unitarity_defect();
    out.record("unitarity", key.clone(), Ok((defect < tol.unitarity, defect, vec![num(defect)])), width("unitarity"));

    let gs = (|| {
        let g = t.ground_state_coeffs()?;
        let fixed = (t.forward_coeffs(&g)? - &g).norm() / g.norm();
        let eig = (t.basis().eigvals()[0] + params.homogeneous_dim()).abs();
        let pass = fixed < tol.ground_state && eig < tol.ground_state;
        Ok((pass, fixed.max(eig), vec![num(fixed), num(eig)]))
    })();
    out.record("ground_state", key.clone(), gs, width("ground_state"));

    let rule = t.rule();
    let cal = rule.calibration_error();
    out.record(
        "calibration",
        key.clone(),
        Ok((cal < tol.calibration, cal, vec![rule.len().to_string(), num(cal)])),
        width("calibration"),
    );

    let fs = match suite::default_suite(&t, cfg.seed) {
        Ok(fs) => fs,
        Err(e) => {
            out.record("hy", key, Err(e), width("hy"));
            return out;
        }
    };
    let coeffs: Vec<&CVector> = fs.iter().map(|f| &f.coeffs).collect();

    let m_hat = if cfg.p_values.is_empty() {
        None
    } else {
        Some(kernel_bound_estimate(&params, Execution::Sequential))
    };
    if let Some(Ok(m)) = &m_hat {
        out.fixtures.push((format!("kernel_bound/{key}"), *m));
    }
    for &p in &cfg.p_values {
        let case = format!("{key}/p{p}");
        let res = (|| {
            let m = m_hat.clone().expect("estimated when p values exist")?;
            let rs = ratios(coeffs.iter().map(|f| hy_ratio(&t, f, p, m)).collect())?;
            let max = rs.iter().copied().fold(0.0, f64::max);
            let pass = if p == 2.0 {
                rs.iter().all(|r| (r - 1.0).abs() < tol.plancherel)
            } else {
                max <= 1.0 + tol.hy_slack
            };
            Ok((pass, max, vec![num(p), num(m), num(max), num(median(&rs))]))
        })();
        out.record("hy", case, res, width("hy"));
    }

    for psi_spec in &cfg.psi {
        let psi = psi_symbol(psi_spec, &params);
        for &p in &cfg.p_values {
            let case = format!("{key}/{psi_spec}/p{p}");
            let res = psi.clone().and_then(|psi| {
                let rs = ratios(coeffs.iter().map(|f| paley_ratio(&t, f, &psi, p)).collect())?;
                let (max, med) = (rs.iter().copied().fold(0.0, f64::max), median(&rs));
                let pass = rs.iter().all(|r| r.is_finite()) && max <= tol.uniformity * med;
                Ok((pass, max, vec![psi_spec.clone(), num(p), num(max), num(med)]))
            });
            out.record("paley", case, res, width("paley"));
            for &b in &cfg.hyp_b {
                if !(b >= p && b <= conjugate(p)) {
                    continue;
                }
                let case = format!("{key}/{psi_spec}/p{p}/b{b}");
                let res = psi.clone().and_then(|psi| {
                    let rs = ratios(coeffs.iter().map(|f| hyp_ratio(&t, f, &psi, p, b)).collect())?;
                    let (max, med) = (rs.iter().copied().fold(0.0, f64::max), median(&rs));
                    let pass = rs.iter().all(|r| r.is_finite()) && max <= tol.uniformity * med;
                    Ok((pass, max, vec![psi_spec.clone(), num(p), num(b), num(max), num(med)]))
                });
                out.record("hyp", case, res, width("hyp"));
            }
        }
    }

    let opts = VerifyOptions {
        families: TestFamily::parse(&cfg.suite).unwrap_or_else(|_| TestFamily::ALL.to_vec()),
        n_samples: cfg.opnorm_samples,
        seed: cfg.seed,
        tolerance_factor: tol.multiplier_factor,
        exec: Execution::Sequential,
    };
    let d = params.homogeneous_dim();
    for &p in &cfg.p_values {
        for &q in &cfg.q_values {
            let gamma = d * (1.0 / p - 1.0 / q);
            if gamma > 0.0 {
                let case = format!("{key}/p{p}/q{q}");
                let res = MultiplierSymbol::power(gamma).and_then(|h| verify_multiplier_theorem(&t, &h, p, q, &opts));
                if let Ok(r) = &res {
                    out.fixtures.push((format!("hormander/{case}"), r.hormander));
                }
                let res = res.map(|r| {
                    let row = vec![r.symbol.clone(), num(p), num(q), num(r.hormander), num(r.max_ratio), num(r.ratio_to_bound)];
                    (r.pass, r.ratio_to_bound, row)
                });
                out.record("multiplier", case, res, width("multiplier"));
            }
            for s in &cfg.symbols {
                let case = format!("{key}/{s}/p{p}/q{q}");
                let res = MultiplierSymbol::parse(s).and_then(|h| {
                    let v = hormander_bound(rule, &h, p, q)?;
                    Ok((true, v.value, vec![s.clone(), num(p), num(q), num(v.value), v.exact.to_string()]))
                });
                out.record("bound", case, res, width("bound"));
            }
        }
    }
    out
}

/// Runs every case of `cfg`. Case failures land in the bundle; only an invalid
/// config is an error.
pub fn run_sweep(cfg: &RunConfig) -> Result<Bundle> {
    cfg.validate()?;
    let partials = par::map(Execution::Parallel, &cfg.params, |spec| run_params(cfg, spec));

    let mut rows: BTreeMap<&str, Vec<Vec<String>>> = BTreeMap::new();
    let mut cases = Vec::new();
    let mut fixtures = BTreeMap::new();
    for part in partials {
        for (family, r) in part.rows {
            rows.entry(family).or_default().extend(r);
        }
        cases.extend(part.cases);
        fixtures.extend(part.fixtures);
    }
    cases.sort_by(|a, b| (&a.family, &a.key).cmp(&(&b.family, &b.key)));

    let mut files = BTreeMap::new();
    for (family, header) in HEADERS {
        let Some(mut r) = rows.remove(family) else { continue };
        r.sort();
        let mut table = Table::new(header);
        for row in r {
            table.push(row);
        }
        files.insert(format!("{family}.csv"), table.to_csv()?);
    }

    let mut summary = Summary {
        fixtures,
        ..Summary::default()
    };
    for c in &cases {
        let fam = summary.families.entry(c.family.clone()).or_default();
        fam.cases += 1;
        if c.pass {
            fam.passed += 1;
        }
        if let Some(m) = c.metric.filter(|m| m.is_finite()) {
            fam.max_metric = Some(fam.max_metric.map_or(m, |x| x.max(m)));
        }
        summary.case_total += 1;
        if c.pass {
            summary.pass_total += 1;
        } else {
            summary.failures.push(format!("{}/{}", c.family, c.key));
        }
        if let Some(e) = &c.error {
            summary.errors.insert(format!("{}/{}", c.family, c.key), e.clone());
        }
    }
    Ok(Bundle { files, cases, summary })
}

/// Writes the CSV files and `summary.json` into `dir`.
pub fn write_bundle(bundle: &Bundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in &bundle.files {
        fs::write(dir.join(name), text)?;
    }
    fs::write(dir.join("summary.json"), bundle.summary_json()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config() {
        let b = run_sweep(&RunConfig::default()).unwrap();
        assert!(b.files.is_empty());
        let s: Summary = serde_json::from_str(&b.summary_json().unwrap()).unwrap();
        assert_eq!((s.case_total, s.pass_total), (0, 0));
    }

    #[test]
    fn inadmissible_case_is_isolated() {
        let cfg = RunConfig {
            params: vec![
                ParamSpec { dim: 1, k: 0.0, a: 0.5, radial: false },
                ParamSpec { dim: 1, k: 0.5, a: 2.0, radial: false },
            ],
            n_basis: 16,
            ..RunConfig::default()
        };
        let b = run_sweep(&cfg).unwrap();
        let bad: Vec<_> = b.cases.iter().filter(|c| c.error.is_some()).collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].key.starts_with("N1_k0_a0.5"));
        assert!(b.files["unitarity.csv"].contains("InadmissibleParams"));
        assert_eq!(b.summary.pass_total, b.summary.case_total - 1);
    }

    #[test]
    fn unknown_fields_and_bad_specs_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"nbasis": 3}"#).is_err());
        let cfg = RunConfig {
            symbols: vec!["wiggle".into()],
            ..RunConfig::default()
        };
        assert!(run_sweep(&cfg).is_err());
    }
}
