use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::graph::{InterventionFamily, InterventionTarget};

/// Samples with a per-row intervention label, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    p: usize,
    values: Vec<f64>,
    targets: Vec<InterventionTarget>,
}

impl Dataset {
    pub fn new(p: usize) -> Self {
        Dataset { p, values: Vec::new(), targets: Vec::new() }
    }

    pub fn with_capacity(p: usize, n: usize) -> Self {
        Dataset { p, values: Vec::with_capacity(n * p), targets: Vec::with_capacity(n) }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.p..(k + 1) * self.p]
    }

    pub fn target(&self, k: usize) -> InterventionTarget {
        self.targets[k]
    }

    pub fn targets(&self) -> &[InterventionTarget] {
        &self.targets
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], InterventionTarget)> {
        self.values.chunks_exact(self.p.max(1)).zip(self.targets.iter().copied())
    }

    pub fn push_row(&mut self, x: &[f64], target: InterventionTarget) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::InvalidData(format!("row has {} values, expected {}", x.len(), self.p)));
        }
        target.validate(self.p)?;
        self.values.extend_from_slice(x);
        self.targets.push(target);
        Ok(())
    }

    pub fn extend(&mut self, other: &Dataset) {
        assert_eq!(self.p, other.p, "datasets over different node counts");
        self.values.extend_from_slice(&other.values);
        self.targets.extend_from_slice(&other.targets);
    }

    pub fn concat(parts: &[&Dataset]) -> Dataset {
        let p = parts.first().map_or(0, |d| d.p);
        let mut out = Dataset::new(p);
        for d in parts {
            out.extend(d);
        }
        out
    }

    /// Rows picked by index, in the given order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut out = Dataset::with_capacity(self.p, indices.len());
        for &k in indices {
            out.values.extend_from_slice(self.row(k));
            out.targets.push(self.targets[k]);
        }
        out
    }

    /// Number of rows that do not intervene on `node`.
    pub fn count_sparing(&self, node: usize) -> usize {
        self.targets.iter().filter(|t| !t.contains(node)).count()
    }

    pub fn validate_family(&self, family: &InterventionFamily) -> Result<()> {
        for (k, &t) in self.targets.iter().enumerate() {
            if !t.is_observational() && !family.contains(t) {
                return Err(Error::InvalidData(format!("row {k}: target {t} is not in the family")));
            }
        }
        Ok(())
    }

    /// Subtracts each column's mean, computed over rows that do not intervene
    /// on that column; intervened entries are left as they are.
    pub fn center_columns(&mut self) {
        for j in 0..self.p {
            let (mut sum, mut cnt) = (0.0, 0usize);
            for k in 0..self.n() {
                if !self.targets[k].contains(j) {
                    sum += self.values[k * self.p + j];
                    cnt += 1;
                }
            }
            if cnt == 0 {
                continue;
            }
            let mean = sum / cnt as f64;
            for k in 0..self.n() {
                if !self.targets[k].contains(j) {
                    self.values[k * self.p + j] -= mean;
                }
            }
        }
    }

    /// Reads the CSV layout `x0,…,x{p-1},target`; column order is free, the
    /// target column holds `;`-separated node indices (empty = observational).
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(Error::InvalidData("empty file: no header row".into()));
        }
        let mut target_col = None;
        let mut value_cols: Vec<(usize, usize)> = Vec::new();
        for (c, name) in headers.iter().enumerate() {
            if name == "target" {
                if target_col.replace(c).is_some() {
                    return Err(Error::InvalidData("column \"target\" appears twice".into()));
                }
            } else if let Some(idx) = name.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
                value_cols.push((idx, c));
            } else {
                return Err(Error::InvalidData(format!("unexpected column {name:?}; expected x0..x{{p-1}} and target")));
            }
        }
        let target_col = target_col.ok_or_else(|| Error::InvalidData("missing column \"target\"".into()))?;
        value_cols.sort_unstable();
        let p = value_cols.len();
        for (expect, &(idx, _)) in value_cols.iter().enumerate() {
            if idx != expect {
                return Err(Error::InvalidData(format!("missing or duplicate value column x{expect}")));
            }
        }
        if p == 0 {
            return Err(Error::InvalidData("no value columns".into()));
        }
        let mut data = Dataset::new(p);
        let mut x = vec![0.0; p];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let line = r + 2;
            for &(idx, c) in &value_cols {
                let field = &record[c];
                x[idx] = field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::InvalidData(format!("line {line}, column x{idx}: bad number {field:?}")))?;
            }
            let target: InterventionTarget = record[target_col]
                .parse()
                .map_err(|e| Error::InvalidData(format!("line {line}, column target: {e}")))?;
            target
                .validate(p)
                .map_err(|e| Error::InvalidData(format!("line {line}, column target: {e}")))?;
            data.push_row(&x, target)?;
        }
        Ok(data)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.p).map(|j| format!("x{j}")).collect();
        header.push("target".into());
        w.write_record(&header)?;
        for (row, t) in self.rows() {
            let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            rec.push(t.encode());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut d = Dataset::new(2);
        d.push_row(&[0.1 + 0.2, -1e-300], InterventionTarget::OBSERVATIONAL).unwrap();
        d.push_row(&[std::f64::consts::PI, 2.0], InterventionTarget::new([0, 1]).unwrap()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1,target\n"));
        assert!(text.contains(",0;1\n"));
        assert_eq!(Dataset::read_csv(&buf[..]).unwrap(), d);
    }

    #[test]
    fn csv_columns_may_be_reordered() {
        let text = "target,x1,x0\n1,2.5,1.5\n,0,0\n";
        let d = Dataset::read_csv(text.as_bytes()).unwrap();
        assert_eq!(d.row(0), &[1.5, 2.5]);
        assert_eq!(d.target(0), InterventionTarget::single(1));
    }

    #[test]
    fn csv_errors_name_the_problem() {
        let err = Dataset::read_csv("x0,x1\n1,2\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("target"), "{err}");
        let err = Dataset::read_csv("x0,x2,target\n1,2,\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("x1"), "{err}");
        let err = Dataset::read_csv("x0,target\nabc,\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("x0"), "{err}");
        let err = Dataset::read_csv("x0,target\n1,3\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(Dataset::read_csv("".as_bytes()).is_err());
    }

    #[test]
    fn centering_uses_non_intervened_rows() {
        let mut d = Dataset::new(1);
        d.push_row(&[1.0], InterventionTarget::OBSERVATIONAL).unwrap();
        d.push_row(&[3.0], InterventionTarget::OBSERVATIONAL).unwrap();
        d.push_row(&[10.0], InterventionTarget::single(0)).unwrap();
        d.center_columns();
        assert_eq!(d.row(0), &[-1.0]);
        assert_eq!(d.row(1), &[1.0]);
        assert_eq!(d.row(2), &[10.0]);
    }
}
