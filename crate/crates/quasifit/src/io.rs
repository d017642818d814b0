//! CSV input and output.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use quasifit_core::{DataSet, PointSet};

use crate::error::{CliError, CliResult};

/// A parsed CSV table: header names and numeric rows, with the positions of
/// the design columns `x1..xd`.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    x_cols: Vec<usize>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::from_reader(file).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn from_reader(r: impl Read) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| CliError::Input(format!("malformed CSV header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        if headers.iter().all(String::is_empty) {
            return Err(CliError::Input("missing CSV header".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        let x_cols = design_columns(&headers)?;
        Ok(Self { headers, rows, x_cols })
    }

    pub fn dim(&self) -> usize {
        self.x_cols.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn value(&self, row: usize, col: usize) -> CliResult<f64> {
        let raw = &self.rows[row][col];
        let v: f64 = raw.parse().map_err(|_| {
            CliError::Input(format!("row {}, column {}: not a number: {raw:?}", row + 1, self.headers[col]))
        })?;
        if !v.is_finite() {
            return Err(CliError::Input(format!(
                "row {}, column {}: value must be finite",
                row + 1,
                self.headers[col]
            )));
        }
        Ok(v)
    }

    /// Numeric column by name; `None` if the column is absent.
    pub fn numbers(&self, name: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(c) = self.column(name) else { return Ok(None) };
        (0..self.len()).map(|r| self.value(r, c)).collect::<CliResult<Vec<_>>>().map(Some)
    }

    /// Numeric column that must be present.
    pub fn required(&self, name: &str) -> CliResult<Vec<f64>> {
        self.numbers(name)?.ok_or_else(|| CliError::Input(format!("missing column {name:?}")))
    }

    pub fn points(&self) -> CliResult<PointSet> {
        if self.is_empty() {
            return Err(CliError::Input("no data rows".into()));
        }
        let mut flat = Vec::with_capacity(self.len() * self.dim());
        for r in 0..self.len() {
            for &c in &self.x_cols {
                flat.push(self.value(r, c)?);
            }
        }
        Ok(PointSet::from_flat(self.dim(), flat)?)
    }

    /// Design points, responses from `response` and weights from `w` if
    /// present.
    pub fn dataset(&self, response: &str) -> CliResult<DataSet> {
        let x = self.points()?;
        let y = self.required(response)?;
        let data = match self.numbers("w")? {
            Some(w) => DataSet::weighted(x, y, w),
            None => DataSet::new(x, y),
        };
        data.map_err(|e| CliError::Input(e.to_string()))
    }
}

/// Positions of `x1, x2, ..., xd`; every index from 1 to d must appear once.
fn design_columns(headers: &[String]) -> CliResult<Vec<usize>> {
    let mut found: Vec<(usize, usize)> = Vec::new();
    for (pos, h) in headers.iter().enumerate() {
        if let Some(k) = h.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
            if found.iter().any(|&(j, _)| j == k) {
                return Err(CliError::Input(format!("duplicate column {h:?}")));
            }
            found.push((k, pos));
        }
    }
    if found.is_empty() {
        return Err(CliError::Input("no design columns x1..xd in the header".into()));
    }
    found.sort_unstable();
    for (want, &(k, _)) in (1..).zip(&found) {
        if k != want {
            return Err(CliError::Input(format!("design columns must be x1..x{}, missing x{want}", found.len())));
        }
    }
    Ok(found.into_iter().map(|(_, pos)| pos).collect())
}

/// Writes a header and rows of numbers. Values are printed in the shortest
/// form that parses back to the same `f64`.
pub fn write_csv(out: &mut dyn Write, headers: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::Other(format!("writing CSV: {e}"));
    w.write_record(headers).map_err(fail)?;
    for row in rows {
        w.write_record(row.iter().map(f64::to_string)).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::Other(format!("writing CSV: {e}")))
}

pub fn x_headers(d: usize) -> Vec<String> {
    (1..=d).map(|k| format!("x{k}")).collect()
}

/// Opens `path` for writing, or standard output when it is `None` or `-`.
pub fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        _ => Ok(Box::new(std::io::stdout().lock())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(s: &str) -> CliResult<Table> {
        Table::from_reader(s.as_bytes())
    }

    #[test]
    fn reads_design_columns_in_any_order() {
        let t = table("y,x2,truth,x1\n1,2,9,3\n4,5,9,6\n").unwrap();
        let d = t.dataset("y").unwrap();
        assert_eq!(d.x.point(0), &[3.0, 2.0]);
        assert_eq!(d.y, vec![1.0, 4.0]);
        assert_eq!(d.weights, vec![1.0, 1.0]);
    }

    #[test]
    fn weights_are_optional() {
        let d = table("x1,y,w\n0,1,2\n1,2,0.5\n").unwrap().dataset("y").unwrap();
        assert_eq!(d.weights, vec![2.0, 0.5]);
        assert!(table("x1,y,w\n0,1,0\n").unwrap().dataset("y").is_err());
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(table("").is_err());
        assert!(table("a,b\n1,2\n").is_err());
        assert!(table("x1,x3,y\n1,2,3\n").is_err());
        assert!(table("x1,y\n1\n").is_err());
        assert!(table("x1,y\n1,abc\n").unwrap().dataset("y").is_err());
        assert!(table("x1,y\n1,inf\n").unwrap().dataset("y").is_err());
        assert!(table("x1,y\n").unwrap().dataset("y").is_err());
        assert!(table("x1,x2\n1,2\n").unwrap().dataset("y").is_err());
    }

    #[test]
    fn numbers_round_trip_through_text() {
        let v = [0.1 + 0.2, 1.0 / 3.0, -2.5e-300, 7.0];
        let mut buf = Vec::new();
        write_csv(&mut buf, &["x1".into()], &v.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        let back = Table::from_reader(&buf[..]).unwrap().required("x1").unwrap();
        assert_eq!(back, v);
    }
}
