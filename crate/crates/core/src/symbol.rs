//! Multiplier symbols and Paley weights.
//!
//! Closed-form symbols all belong to the radial family
//! `scale * |xi|^{-gamma} * 1{|xi| <= radius}`, which covers power symbols,
//! ball indicators and constants and is closed under pointwise products.
//! Anything else is sampled on a grid.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSymbol {
    pub scale: f64,
    pub gamma: f64,
    pub radius: f64,
}

impl RadialSymbol {
    pub fn eval(&self, xi: f64) -> f64 {
        let r = xi.abs();
        if r > self.radius || self.scale == 0.0 {
            return 0.0;
        }
        if self.gamma == 0.0 {
            self.scale
        } else {
            self.scale * r.powf(-self.gamma)
        }
    }

    pub fn product(&self, other: &RadialSymbol) -> RadialSymbol {
        RadialSymbol {
            scale: self.scale * other.scale,
            gamma: self.gamma + other.gamma,
            radius: self.radius.min(other.radius),
        }
    }

    /// `|h|^e` for `e > 0`.
    pub fn abs_pow(&self, e: f64) -> RadialSymbol {
        RadialSymbol {
            scale: self.scale.abs().powf(e),
            gamma: self.gamma * e,
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSymbol {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledSymbol {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("sampled symbol has no samples".into()));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(values).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("sampled symbol has repeated nodes".into()));
        }
        let (nodes, values) = pairs.into_iter().unzip();
        Ok(Self { nodes, values })
    }

    /// Linear interpolation; zero outside the sampled range.
    pub fn eval(&self, xi: f64) -> f64 {
        let n = self.nodes.len();
        if xi < self.nodes[0] || xi > self.nodes[n - 1] {
            return 0.0;
        }
        match self.nodes.binary_search_by(|x| x.total_cmp(&xi)) {
            Ok(i) => self.values[i],
            Err(i) => {
                let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
                let t = (xi - x0) / (x1 - x0);
                self.values[i - 1] * (1.0 - t) + self.values[i] * t
            }
        }
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Io(format!("{}: missing column {i}", path.display())))?
                    .parse::<f64>()
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
            };
            nodes.push(parse(0)?);
            values.push(parse(1)?);
        }
        Self::new(nodes, values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierSymbol {
    Radial(RadialSymbol),
    Sampled(SampledSymbol),
    Product(Vec<MultiplierSymbol>),
}

impl MultiplierSymbol {
    /// `|xi|^{-gamma}`, `gamma > 0`.
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "power symbol needs gamma > 0, got {gamma}"
            )));
        }
        Ok(Self::Radial(RadialSymbol {
            scale: 1.0,
            gamma,
            radius: f64::INFINITY,
        }))
    }

    /// `1{|xi| <= radius}`.
    pub fn indicator(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "indicator radius must be positive, got {radius}"
            )));
        }
        Ok(Self::Radial(RadialSymbol {
            scale: 1.0,
            gamma: 0.0,
            radius,
        }))
    }

    pub fn constant(c: f64) -> Self {
        Self::Radial(RadialSymbol {
            scale: c,
            gamma: 0.0,
            radius: f64::INFINITY,
        })
    }

    pub fn identity() -> Self {
        Self::constant(1.0)
    }

    pub fn scaled(self, c: f64) -> Self {
        Self::Product(vec![Self::constant(c), self]).simplified()
    }

    pub fn times(self, other: MultiplierSymbol) -> Self {
        Self::Product(vec![self, other]).simplified()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Self::Radial(r) => r.eval(xi),
            Self::Sampled(s) => s.eval(xi),
            Self::Product(fs) => fs.iter().map(|f| f.eval(xi)).product(),
        }
    }

    /// The closed form, if this symbol (after merging products) is radial.
    pub fn as_radial(&self) -> Option<RadialSymbol> {
        match self.simplified() {
            Self::Radial(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        self.as_radial().is_some()
    }

    /// Flattens products and merges every radial factor into one.
    pub fn simplified(&self) -> Self {
        let mut radial = RadialSymbol {
            scale: 1.0,
            gamma: 0.0,
            radius: f64::INFINITY,
        };
        let mut others = Vec::new();
        fn walk(s: &MultiplierSymbol, radial: &mut RadialSymbol, others: &mut Vec<MultiplierSymbol>) {
            match s {
                MultiplierSymbol::Radial(r) => *radial = radial.product(r),
                MultiplierSymbol::Sampled(_) => others.push(s.clone()),
                MultiplierSymbol::Product(fs) => fs.iter().for_each(|f| walk(f, radial, others)),
            }
        }
        walk(self, &mut radial, &mut others);
        if others.is_empty() {
            return Self::Radial(radial);
        }
        if radial.scale == 1.0 && radial.gamma == 0.0 && radial.radius == f64::INFINITY {
            if others.len() == 1 {
                return others.pop().unwrap();
            }
            return Self::Product(others);
        }
        others.insert(0, Self::Radial(radial));
        Self::Product(others)
    }

    /// Parses the symbol mini-language: `power:gamma=2`, `indicator:R=1`,
    /// `const:0.5`, `one`, `zero`, `sampled:<path>`, joined by `*` for products.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.contains('*') {
            let factors = spec
                .split('*')
                .map(Self::parse)
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Product(factors).simplified());
        }
        let bad = |reason: &str| Error::InvalidSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "one" | "identity" => Ok(Self::identity()),
            "zero" => Ok(Self::constant(0.0)),
            "const" => {
                let c = rest.parse::<f64>().map_err(|_| bad("expected const:<value>"))?;
                Ok(Self::constant(c))
            }
            "power" => {
                let kv = parse_kv(rest).map_err(|r| bad(&r))?;
                let gamma = lookup(&kv, &["gamma", "g"]).ok_or_else(|| bad("missing gamma"))?;
                let scale = lookup(&kv, &["scale", "c"]).unwrap_or(1.0);
                Ok(Self::power(gamma)
                    .map_err(|e| bad(&e.to_string()))?
                    .scaled(scale))
            }
            "indicator" | "ball" => {
                let kv = parse_kv(rest).map_err(|r| bad(&r))?;
                let r = lookup(&kv, &["R", "r", "radius"]).ok_or_else(|| bad("missing R"))?;
                let h = lookup(&kv, &["height", "scale", "c"]).unwrap_or(1.0);
                Ok(Self::indicator(r).map_err(|e| bad(&e.to_string()))?.scaled(h))
            }
            "sampled" => {
                if rest.is_empty() {
                    return Err(bad("expected sampled:<path>"));
                }
                Ok(Self::Sampled(SampledSymbol::from_csv(Path::new(rest))?))
            }
            _ => Err(bad("unknown symbol kind")),
        }
    }
}

impl fmt::Display for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Radial(r) => {
                let mut parts = Vec::new();
                if r.gamma != 0.0 {
                    parts.push(format!("power:gamma={},scale={}", r.gamma, r.scale));
                } else if r.radius.is_finite() {
                    parts.push(format!("indicator:R={},height={}", r.radius, r.scale));
                    return write!(f, "{}", parts.join("*"));
                } else {
                    return write!(f, "const:{}", r.scale);
                }
                if r.radius.is_finite() {
                    parts.push(format!("indicator:R={}", r.radius));
                }
                write!(f, "{}", parts.join("*"))
            }
            Self::Sampled(s) => write!(f, "sampled[{}]", s.nodes.len()),
            Self::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

/// Parses `key=value,key=value` into pairs.
pub(crate) fn parse_kv(s: &str) -> std::result::Result<Vec<(String, f64)>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let v = v
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("`{v}` is not a number"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

pub(crate) fn lookup(kv: &[(String, f64)], keys: &[&str]) -> Option<f64> {
    kv.iter()
        .find(|(k, _)| keys.contains(&k.as_str()))
        .map(|&(_, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_kinds() {
        let p = MultiplierSymbol::parse("power:gamma=2").unwrap();
        assert_eq!(p.eval(2.0), 0.25);
        let i = MultiplierSymbol::parse("indicator:R=1").unwrap();
        assert_eq!(i.eval(0.5), 1.0);
        assert_eq!(i.eval(-1.5), 0.0);
        assert_eq!(MultiplierSymbol::parse("one").unwrap().eval(7.0), 1.0);
        assert_eq!(MultiplierSymbol::parse("const:0.5").unwrap().eval(7.0), 0.5);
        assert!(MultiplierSymbol::parse("power:gamma=-1").is_err());
        assert!(MultiplierSymbol::parse("wavelet:x=1").is_err());
        assert!(MultiplierSymbol::parse("power:gamma").is_err());
    }

    #[test]
    fn products_merge_into_closed_form() {
        let s = MultiplierSymbol::parse("power:gamma=1*indicator:R=2*const:3").unwrap();
        let r = s.as_radial().unwrap();
        assert_eq!(r, RadialSymbol { scale: 3.0, gamma: 1.0, radius: 2.0 });
        assert_eq!(s.eval(1.0), 3.0);
        assert_eq!(s.eval(2.5), 0.0);
        let back = MultiplierSymbol::parse(&s.to_string()).unwrap();
        assert_eq!(back.as_radial(), Some(r));
    }

    #[test]
    fn sampled_interpolates() {
        let s = SampledSymbol::new(vec![1.0, 0.0, 2.0], vec![2.0, 0.0, 4.0]).unwrap();
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(2.0), 4.0);
        assert_eq!(s.eval(3.0), 0.0);
        assert!(SampledSymbol::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn mixed_product_stays_numeric() {
        let s = SampledSymbol::new(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let m = MultiplierSymbol::Sampled(s).times(MultiplierSymbol::constant(2.0));
        assert!(!m.is_closed_form());
        assert_eq!(m.eval(0.0), 2.0);
    }
}
