//! Time coefficients and initial-data specs.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbol::{lookup, parse_kv};
use crate::transform::{CVector, TransformOperator};

/// `b(t)` in the wave nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeCoefficient {
    Constant(f64),
    /// `scale * t^{-gamma}`.
    Power { scale: f64, gamma: f64 },
    /// Piecewise linear through `(times, values)`, constant beyond the ends.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl TimeCoefficient {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Power { scale, gamma } => scale * t.powf(-gamma),
            Self::Sampled { times, values } => {
                let i = times.partition_point(|&s| s <= t);
                if i == 0 {
                    values[0]
                } else if i == times.len() {
                    values[i - 1]
                } else {
                    let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
                    values[i - 1] + w * (values[i] - values[i - 1])
                }
            }
        }
    }

    /// Value used at a grid node `t` with spacing `h`; at a singular origin
    /// the average over the first cell replaces the point value.
    pub fn node_value(&self, t: f64, h: f64) -> f64 {
        match self {
            Self::Power { scale, gamma } if t == 0.0 && *gamma > 0.0 => scale * h.powf(-gamma) / (1.0 - gamma),
            _ => self.eval(t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(c) => *c == 0.0,
            Self::Power { scale, .. } => *scale == 0.0,
            Self::Sampled { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// `||b||_{L^2(0,T)}`, possibly infinite.
    pub fn l2_norm(&self, horizon: f64) -> Result<f64> {
        if !(horizon >= 0.0) {
            return Err(Error::InvalidArgument(format!("T = {horizon} must be nonnegative")));
        }
        Ok(match self {
            Self::Constant(c) => c.abs() * horizon.sqrt(),
            Self::Power { scale, gamma } => {
                if *scale == 0.0 {
                    0.0
                } else if *gamma >= 0.5 {
                    f64::INFINITY
                } else {
                    scale.abs() * (horizon.powf(1.0 - 2.0 * gamma) / (1.0 - 2.0 * gamma)).sqrt()
                }
            }
            Self::Sampled { .. } => {
                // exact for the piecewise-linear interpolant
                let mut knots = vec![0.0];
                if let Self::Sampled { times, .. } = self {
                    knots.extend(times.iter().copied().filter(|&s| s > 0.0 && s < horizon));
                }
                knots.push(horizon);
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (v0, v1) = (self.eval(w[0]), self.eval(w[1]));
                    acc += (w[1] - w[0]) * (v0 * v0 + v0 * v1 + v1 * v1) / 3.0;
                }
                acc.sqrt()
            }
        })
    }

    /// `const:<v>`, `zero`, `power:c=..,gamma=..`, `sampled:<path>` (CSV `t,value`).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |reason: &str| Error::InvalidSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "zero" => Ok(Self::Constant(0.0)),
            "const" => {
                let v = match rest.parse::<f64>() {
                    Ok(v) => v,
                    Err(_) => {
                        let kv = parse_kv(rest).map_err(|r| bad(&r))?;
                        lookup(&kv, &["c", "value"]).ok_or_else(|| bad("expected const:<value>"))?
                    }
                };
                Ok(Self::Constant(v))
            }
            "power" => {
                let kv = parse_kv(rest).map_err(|r| bad(&r))?;
                let gamma = lookup(&kv, &["gamma", "g"]).ok_or_else(|| bad("missing gamma"))?;
                let scale = lookup(&kv, &["c", "scale"]).unwrap_or(1.0);
                if !(0.0..1.0).contains(&gamma) {
                    return Err(bad("gamma must lie in [0, 1)"));
                }
                Ok(Self::Power { scale, gamma })
            }
            "sampled" => {
                if rest.is_empty() {
                    return Err(bad("expected sampled:<path>"));
                }
                Self::from_csv(Path::new(rest))
            }
            _ => Err(bad("unknown time coefficient")),
        }
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for rec in rdr.deserialize() {
            rows.push(rec?);
        }
        if rows.is_empty() {
            return Err(Error::InvalidArgument(format!("{} has no samples", path.display())));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate sample times".into()));
        }
        let (times, values) = rows.into_iter().unzip();
        Ok(Self::Sampled { times, values })
    }
}

/// `zero`, `groundstate[:scale=s]` (normalized, so `||u0|| = s`),
/// `gaussian:s=..[,scale=..]` for `scale * exp(-s |x|^a / a)`, `basis:n=..[,scale=..]`.
pub fn parse_initial_data(spec: &str, t: &TransformOperator) -> Result<CVector> {
    let spec = spec.trim();
    let bad = |reason: &str| Error::InvalidSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let kv = parse_kv(rest).map_err(|r| bad(&r))?;
    let scale = lookup(&kv, &["scale", "c"]).unwrap_or(1.0);
    match kind {
        "zero" => Ok(CVector::zeros(t.len())),
        "groundstate" | "ground" => {
            let g = t.ground_state_coeffs()?;
            let n = g.norm();
            Ok(g * Complex64::new(scale / n, 0.0))
        }
        "gaussian" => {
            let s = lookup(&kv, &["s"]).ok_or_else(|| bad("missing s"))?;
            let a = t.params().a;
            let vals: Vec<Complex64> = t
                .rule()
                .nodes()
                .iter()
                .map(|x| Complex64::new(scale * (-s * x.abs().powf(a) / a).exp(), 0.0))
                .collect();
            t.project_strict(&vals)
        }
        "basis" => {
            let n = lookup(&kv, &["n"]).ok_or_else(|| bad("missing n"))?;
            if n < 0.0 || n.fract() != 0.0 || n as usize >= t.len() {
                return Err(bad("n must be a basis index"));
            }
            let mut c = CVector::zeros(t.len());
            c[n as usize] = Complex64::new(scale, 0.0);
            Ok(c)
        }
        _ => Err(bad("unknown initial data")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn l2_norms() {
        assert!((TimeCoefficient::Constant(2.0).l2_norm(4.0).unwrap() - 4.0).abs() < 1e-15);
        let p = TimeCoefficient::Power { scale: 1.0, gamma: 0.25 };
        assert!((p.l2_norm(4.0).unwrap() - (2.0f64 * 2.0).sqrt()).abs() < 1e-14);
        let q = TimeCoefficient::Power { scale: 1.0, gamma: 0.5 };
        assert_eq!(q.l2_norm(1.0).unwrap(), f64::INFINITY);
        let s = TimeCoefficient::Sampled {
            times: vec![0.0, 1.0],
            values: vec![0.0, 1.0],
        };
        assert!((s.l2_norm(1.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.l2_norm(2.0).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parsing() {
        assert_eq!(TimeCoefficient::parse("const:1").unwrap(), TimeCoefficient::Constant(1.0));
        assert!(TimeCoefficient::parse("zero").unwrap().is_zero());
        assert!(matches!(
            TimeCoefficient::parse("power:c=2,gamma=0.3").unwrap(),
            TimeCoefficient::Power { .. }
        ));
        assert!(TimeCoefficient::parse("power:gamma=1.5").is_err());
        assert!(TimeCoefficient::parse("wiggle").is_err());
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "t,value\n0,1\n2,3").unwrap();
        let s = TimeCoefficient::parse(&format!("sampled:{}", f.path().display())).unwrap();
        assert_eq!(s.eval(1.0), 2.0);
    }
}
