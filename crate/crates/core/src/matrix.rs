use std::io::{Read, Write};

use crate::error::{Error, Result};

/// An `n × m` table of finite reals with optional row labels and column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    row_ids: Option<Vec<String>>,
    col_ids: Vec<String>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Column ids default to `c1..cm`.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(DataMatrix {
            rows,
            cols,
            values,
            row_ids: None,
            col_ids: (1..=cols).map(|j| format!("c{j}")).collect(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(i) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::invalid(format!("row {} has a different length", i + 1)));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        DataMatrix::new(rows.len(), cols, values)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        DataMatrix::new(rows, cols, vec![0.0; rows * cols])
    }

    /// The `n × n` identity, i.e. one indicator vector per observation.
    pub fn identity(n: usize) -> Result<Self> {
        let mut m = DataMatrix::zeros(n, n)?;
        for i in 0..n {
            m.values[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn with_col_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.cols {
            return Err(Error::invalid(format!(
                "{} column ids for {} columns",
                ids.len(),
                self.cols
            )));
        }
        self.col_ids = ids;
        Ok(self)
    }

    pub fn with_row_ids(mut self, ids: Option<Vec<String>>) -> Result<Self> {
        if let Some(ids) = &ids {
            if ids.len() != self.rows {
                return Err(Error::invalid(format!(
                    "{} row ids for {} rows",
                    ids.len(),
                    self.rows
                )));
            }
        }
        self.row_ids = ids;
        Ok(self)
    }

    /// Copies the labels of `other` onto `self` when the shapes allow it.
    pub(crate) fn labels_from(mut self, other: &DataMatrix) -> Self {
        if other.cols == self.cols {
            self.col_ids = other.col_ids.clone();
        }
        if other.rows == self.rows {
            self.row_ids = other.row_ids.clone();
        }
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn row_ids(&self) -> Option<&[String]> {
        self.row_ids.as_deref()
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    /// Largest absolute entry-wise difference. Shapes must agree.
    pub fn max_abs_diff(&self, other: &DataMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &DataMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Returns a copy with rows and columns reordered: output row `i` is input
    /// row `row_perm[i]`, output column `j` is input column `col_perm[j]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<DataMatrix> {
        if !is_permutation(row_perm, self.rows) || !is_permutation(col_perm, self.cols) {
            return Err(Error::invalid("permutation does not match matrix shape"));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &r in row_perm {
            let row = self.row(r);
            values.extend(col_perm.iter().map(|&c| row[c]));
        }
        let out = DataMatrix::new(self.rows, self.cols, values)?
            .with_col_ids(col_perm.iter().map(|&c| self.col_ids[c].clone()).collect())?;
        let row_ids = self
            .row_ids
            .as_ref()
            .map(|ids| row_perm.iter().map(|&r| ids[r].clone()).collect());
        out.with_row_ids(row_ids)
    }

    /// Reads a CSV table. The first record holds column ids. The first column
    /// is taken as row ids when its header cell is empty or when any of its
    /// cells is not a number.
    pub fn read_csv<R: Read>(reader: R) -> Result<DataMatrix> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let records = rdr.records().collect::<std::result::Result<Vec<_>, _>>()?;
        let (header, body) = records
            .split_first()
            .ok_or_else(|| Error::parse(1, None, "empty csv"))?;
        if body.is_empty() {
            return Err(Error::parse(2, None, "csv has a header but no data rows"));
        }
        let labelled = header.get(0) == Some("")
            || body
                .iter()
                .any(|r| r.get(0).is_some_and(|c| c.parse::<f64>().is_err()));
        let skip = usize::from(labelled);
        let col_ids: Vec<String> = header.iter().skip(skip).map(str::to_owned).collect();
        let cols = col_ids.len();
        if cols == 0 {
            return Err(Error::parse(1, None, "no data columns"));
        }

        let mut values = Vec::with_capacity(body.len() * cols);
        let mut row_ids = Vec::with_capacity(body.len());
        for (i, rec) in body.iter().enumerate() {
            let line = i + 2;
            if rec.len() != cols + skip {
                return Err(Error::parse(
                    line,
                    None,
                    format!("expected {} fields, found {}", cols + skip, rec.len()),
                ));
            }
            if labelled {
                row_ids.push(rec[0].to_owned());
            }
            for (j, cell) in rec.iter().enumerate().skip(skip) {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(line, Some(j + 1), format!("not a number: {cell:?}"))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(line, Some(j + 1), "non-finite value"));
                }
                values.push(v);
            }
        }
        DataMatrix::new(body.len(), cols, values)?
            .with_col_ids(col_ids)?
            .with_row_ids(labelled.then_some(row_ids))
    }

    /// Writes CSV using the shortest decimal form that round-trips each value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = Vec::with_capacity(self.cols + 1);
        if self.row_ids.is_some() {
            header.push("");
        }
        header.extend(self.col_ids.iter().map(String::as_str));
        w.write_record(&header)?;
        let mut record: Vec<String> = Vec::with_capacity(self.cols + 1);
        for (i, row) in self.iter_rows().enumerate() {
            record.clear();
            if let Some(ids) = &self.row_ids {
                record.push(ids[i].clone());
            }
            record.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    p.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}
