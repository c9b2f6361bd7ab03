//! Tabular data with a designated response column.
//!
//! The response always lives at column 0; ingestion reorders user columns
//! and keeps the original position of each column so reports can map back.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// An `n × (p + 1)` numeric table stored column-major, response first.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    source_index: Vec<usize>,
}

impl DataMatrix {
    /// Builds a matrix whose first column is the response. Every column must
    /// have the same length and contain only finite values.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::Data("no columns".into()));
        }
        let n = columns[0].len();
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column '{name}' has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    column: name.clone(),
                    row,
                });
            }
        }
        let source_index = (0..columns.len()).collect();
        Ok(Self {
            names,
            columns,
            source_index,
        })
    }

    /// Convenience constructor from a response vector and predictor columns,
    /// named `y`, `x1`, `x2`, ...
    pub fn from_parts(response: Vec<f64>, predictors: Vec<Vec<f64>>) -> Result<Self> {
        let mut names = vec!["y".to_string()];
        names.extend((1..=predictors.len()).map(|j| format!("x{j}")));
        let mut columns = Vec::with_capacity(predictors.len() + 1);
        columns.push(response);
        columns.extend(predictors);
        Self::new(names, columns)
    }

    /// Reads a headed CSV, moving `response` to column 0.
    pub fn from_csv<R: Read>(reader: R, response: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let response_pos = headers
            .iter()
            .position(|h| h == response)
            .ok_or_else(|| Error::Data(format!("unknown response column '{response}'")))?;
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::Data(format!(
                    "row {}: expected {} fields, found {}",
                    row + 1,
                    headers.len(),
                    record.len()
                )));
            }
            for (j, cell) in record.iter().enumerate() {
                let value: f64 = cell.parse().map_err(|_| {
                    Error::Data(format!(
                        "row {}, column '{}': cannot parse '{}' as a number",
                        row + 1,
                        headers[j],
                        cell
                    ))
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        column: headers[j].clone(),
                        row: row + 1,
                    });
                }
                columns[j].push(value);
            }
        }
        if columns[0].is_empty() {
            return Err(Error::Data("no data rows".into()));
        }
        let mut order = vec![response_pos];
        order.extend((0..headers.len()).filter(|&j| j != response_pos));
        let names = order.iter().map(|&j| headers[j].clone()).collect();
        let mut taken: Vec<Option<Vec<f64>>> = columns.into_iter().map(Some).collect();
        let columns = order.iter().map(|&j| taken[j].take().unwrap()).collect();
        Ok(Self {
            names,
            columns,
            source_index: order,
        })
    }

    /// Writes the table as CSV in internal order (response first) using the
    /// shortest representation that round-trips every value exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)?;
        for i in 0..self.n() {
            wtr.write_record(self.columns.iter().map(|c| format!("{}", c[i])))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn predictor_names(&self) -> &[String] {
        &self.names[1..]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn response(&self) -> &[f64] {
        &self.columns[0]
    }

    /// Predictor `j` (zero-based, excluding the response).
    pub fn predictor(&self, j: usize) -> &[f64] {
        &self.columns[j + 1]
    }

    /// Position of each internal column in the originally ingested table.
    pub fn source_index(&self) -> &[usize] {
        &self.source_index
    }

    /// Row `i` as a vector in internal column order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// A new matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect();
        Self {
            names: self.names.clone(),
            columns,
            source_index: self.source_index.clone(),
        }
    }

    /// Keeps the response plus the listed predictors (zero-based).
    pub fn select_predictors(&self, predictors: &[usize]) -> Self {
        let mut keep = vec![0];
        keep.extend(predictors.iter().map(|&j| j + 1));
        Self {
            names: keep.iter().map(|&j| self.names[j].clone()).collect(),
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            source_index: keep.iter().map(|&j| self.source_index[j]).collect(),
        }
    }

    /// Replaces the column values while keeping names and ordering.
    pub fn with_columns(&self, columns: Vec<Vec<f64>>) -> Result<Self> {
        let mut out = Self::new(self.names.clone(), columns)?;
        out.source_index = self.source_index.clone();
        Ok(out)
    }

    /// Appends predictor columns at the end.
    pub fn append_predictors(&mut self, names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<()> {
        let n = self.n();
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column '{name}' has {} rows, expected {n}",
                    col.len()
                )));
            }
        }
        let base = self.source_index.iter().max().map_or(0, |m| m + 1);
        self.source_index.extend(base..base + columns.len());
        self.names.extend(names);
        self.columns.extend(columns);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_moves_response_first() {
        let text = "a,b,y\n1,2,3\n4,5,6\n";
        let z = DataMatrix::from_csv(text.as_bytes(), "y").unwrap();
        assert_eq!(z.names(), &["y", "a", "b"]);
        assert_eq!(z.response(), &[3.0, 6.0]);
        assert_eq!(z.predictor(1), &[2.0, 5.0]);
        assert_eq!(z.source_index(), &[2, 0, 1]);
    }

    #[test]
    fn csv_reports_bad_cell() {
        let text = "y,x\n1,2\n3,abc\n";
        let err = DataMatrix::from_csv(text.as_bytes(), "y").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("'x'"), "{msg}");
    }

    #[test]
    fn csv_rejects_nan_and_unknown_response() {
        let text = "y,x\n1,NaN\n";
        assert!(matches!(
            DataMatrix::from_csv(text.as_bytes(), "y"),
            Err(Error::NonFinite { .. })
        ));
        assert!(DataMatrix::from_csv("y,x\n1,2\n".as_bytes(), "z").is_err());
    }

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let y = vec![0.1, 1.0 / 3.0, -2.5e-300, 7.0];
        let x = vec![std::f64::consts::PI, -0.0, 1e300, 123456789.12345679];
        let z = DataMatrix::from_parts(y, vec![x]).unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf).unwrap();
        let back = DataMatrix::from_csv(buf.as_slice(), "y").unwrap();
        for j in 0..2 {
            for (a, b) in z.column(j).iter().zip(back.column(j)) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn ragged_columns_rejected() {
        let r = DataMatrix::from_parts(vec![1.0, 2.0], vec![vec![1.0]]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
