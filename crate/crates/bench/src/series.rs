use std::io::{Read, Write};
use std::path::Path;

use crate::error::{BenchError, Result};

/// Named table of numeric columns; the first column is non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSeries {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultSeries {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_owned(), columns: columns.iter().map(|c| (*c).to_owned()).collect(), rows: Vec::new() }
    }

    fn invalid(&self, reason: String) -> BenchError {
        BenchError::Series { series: self.name.clone(), reason }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(self.invalid(format!("row has {} values, expected {}", row.len(), self.columns.len())));
        }
        if let Some(last) = self.rows.last() {
            if row[0] < last[0] {
                return Err(self.invalid(format!("first column decreases ({} after {})", row[0], last[0])));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// RFC 4180 CSV with LF line endings and shortest round-trip decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(name: &str, input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(input);
        let csv_err = |e: csv::Error| BenchError::Series { series: name.to_owned(), reason: e.to_string() };
        let columns: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
        let mut series = Self { name: name.to_owned(), columns, rows: Vec::new() };
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| series.invalid(format!("{v:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            series.push(row)?;
        }
        Ok(series)
    }

    /// Writes `<dir>/<name>.csv` and returns the path.
    pub fn save(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let file = std::fs::File::create(&path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|source| BenchError::Csv { path: path.clone(), source })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_text(s: &ResultSeries) -> String {
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = ResultSeries::new("empty", &["t_s", "u_m"]);
        assert_eq!(csv_text(&s), "t_s,u_m\n");
    }

    #[test]
    fn values_roundtrip_exactly() {
        let mut s = ResultSeries::new("rt", &["t_s", "u_m", "f_n"]);
        let vals = [0.1 + 0.2, 1.0 / 3.0, -2.5e-300, f64::MAX, 5e-324, -0.0, 1e21, f64::NAN];
        for (i, v) in vals.iter().enumerate() {
            s.push(vec![i as f64 * 0.1, *v, -v * 7.0]).unwrap();
        }
        let text = csv_text(&s);
        assert!(!text.contains('\r'));
        let back = ResultSeries::read_csv("rt", text.as_bytes()).unwrap();
        assert_eq!(back.columns, s.columns);
        for (a, b) in back.rows.iter().zip(&s.rows) {
            for (x, y) in a.iter().zip(b) {
                assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn rows_are_checked() {
        let mut s = ResultSeries::new("bad", &["t_s", "u_m"]);
        assert!(s.push(vec![1.0]).is_err());
        s.push(vec![1.0, 0.0]).unwrap();
        assert!(s.push(vec![0.5, 0.0]).is_err());
        assert_eq!(s.column("u_m"), Some(vec![0.0]));
        assert_eq!(s.column("v"), None);
    }
}
