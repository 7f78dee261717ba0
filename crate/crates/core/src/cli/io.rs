use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// 17 significant digits, stable across platforms.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// A CSV table held as rendered cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Writes to `path`, or stdout when absent. A closed pipe is not an error.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

/// Pretty JSON plus a trailing newline on stdout.
pub fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    emit(None, &(to_json(value)? + "\n"))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Reads `node,re,im` rows (header optional), sorted by node.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, Complex64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = |j: usize| rec.get(j).map(str::trim).unwrap_or("");
        let node = match cell(0).parse::<f64>() {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Io(format!("{}: bad node on row {}", path.display(), i + 1))),
        };
        let re = cell(1).parse::<f64>().map_err(|_| Error::Io(format!("{}: bad re on row {}", path.display(), i + 1)))?;
        let im = if cell(2).is_empty() {
            0.0
        } else {
            cell(2).parse::<f64>().map_err(|_| Error::Io(format!("{}: bad im on row {}", path.display(), i + 1)))?
        };
        rows.push((node, Complex64::new(re, im)));
    }
    if rows.is_empty() {
        return Err(Error::Io(format!("{} has no samples", path.display())));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(rows)
}

/// Piecewise-linear interpolation of samples onto `nodes`, zero outside their range.
pub fn resample(samples: &[(f64, Complex64)], nodes: &[f64]) -> Vec<Complex64> {
    let lo = samples[0].0;
    let hi = samples[samples.len() - 1].0;
    nodes
        .iter()
        .map(|&x| {
            if x < lo || x > hi {
                return Complex64::new(0.0, 0.0);
            }
            let i = samples.partition_point(|s| s.0 <= x);
            if i == 0 {
                return samples[0].1;
            }
            if i == samples.len() {
                return samples[i - 1].1;
            }
            let (x0, v0) = samples[i - 1];
            let (x1, v1) = samples[i];
            let w = (x - x0) / (x1 - x0);
            v0 + (v1 - v0) * w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn linear_resampling() {
        let s = vec![(0.0, Complex64::new(0.0, 0.0)), (1.0, Complex64::new(2.0, -1.0))];
        let v = resample(&s, &[-0.5, 0.25, 1.0, 3.0]);
        assert_eq!(v[0], Complex64::new(0.0, 0.0));
        assert_eq!(v[1], Complex64::new(0.5, -0.25));
        assert_eq!(v[2], Complex64::new(2.0, -1.0));
        assert_eq!(v[3], Complex64::new(0.0, 0.0));
    }
}
