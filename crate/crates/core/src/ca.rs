//! Correspondence analysis: frequency tables mapped to Euclidean factor
//! coordinates, with optional doubling.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

/// Nonnegative counts with a positive grand total.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    counts: DataMatrix,
}

impl FrequencyTable {
    pub fn new(counts: DataMatrix) -> Result<Self> {
        if let Some(pos) = counts.values().iter().position(|&v| v < 0.0) {
            return Err(Error::invalid(format!(
                "negative count at row {}, column {}",
                pos / counts.cols() + 1,
                pos % counts.cols() + 1
            )));
        }
        if counts.values().iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("frequency table is all zeros"));
        }
        Ok(FrequencyTable { counts })
    }

    pub fn counts(&self) -> &DataMatrix {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.values().iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.counts.iter_rows().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.counts.cols()];
        for row in self.counts.iter_rows() {
            out.iter_mut().zip(row).for_each(|(s, v)| *s += v);
        }
        out
    }

    /// Zero-based indices of rows with no counts.
    pub fn zero_mass_rows(&self) -> Vec<usize> {
        positions_of_zero(&self.row_sums())
    }

    pub fn zero_mass_cols(&self) -> Vec<usize> {
        positions_of_zero(&self.col_sums())
    }

    /// Drops zero-mass rows and columns, keeping labels.
    pub fn without_zero_mass(&self) -> Result<FrequencyTable> {
        let rows: Vec<usize> = keep(&self.row_sums());
        let cols: Vec<usize> = keep(&self.col_sums());
        let values = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.counts.get(i, j))
            .collect();
        let row_ids = self
            .counts
            .row_ids()
            .map(|ids| rows.iter().map(|&i| ids[i].clone()).collect());
        let col_ids = cols.iter().map(|&j| self.counts.col_ids()[j].clone()).collect();
        FrequencyTable::new(
            DataMatrix::new(rows.len(), cols.len(), values)?
                .with_col_ids(col_ids)?
                .with_row_ids(row_ids)?,
        )
    }

    fn row_name(&self, i: usize) -> String {
        match self.counts.row_ids() {
            Some(ids) => format!("row {} ({})", i + 1, ids[i]),
            None => format!("row {}", i + 1),
        }
    }
}

fn positions_of_zero(sums: &[f64]) -> Vec<usize> {
    sums.iter().enumerate().filter(|(_, &s)| s == 0.0).map(|(i, _)| i).collect()
}

fn keep(sums: &[f64]) -> Vec<usize> {
    sums.iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(i, _)| i).collect()
}

/// Appends a complement column `max − a` for every column, so every row sums
/// to `c · max`.
pub fn double(f: &FrequencyTable) -> Result<FrequencyTable> {
    let x = f.counts();
    let (r, c) = x.shape();
    let max = x.values().iter().copied().fold(0.0, f64::max);
    let mut values = Vec::with_capacity(r * 2 * c);
    for row in x.iter_rows() {
        values.extend_from_slice(row);
        values.extend(row.iter().map(|&a| max - a));
    }
    let col_ids = x
        .col_ids()
        .iter()
        .cloned()
        .chain(x.col_ids().iter().map(|id| format!("{id}'")))
        .collect();
    FrequencyTable::new(
        DataMatrix::new(r, 2 * c, values)?
            .with_col_ids(col_ids)?
            .with_row_ids(x.row_ids().map(<[String]>::to_vec))?,
    )
}

/// Row principal coordinates and the inertia of each retained axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorCoordinates {
    pub coords: DataMatrix,
    /// Descending.
    pub inertias: Vec<f64>,
}

impl FactorCoordinates {
    pub fn total_inertia(&self) -> f64 {
        self.inertias.iter().sum()
    }
}

const MIN_INERTIA: f64 = 1e-12;

/// Row principal coordinates from the singular decomposition of the
/// standardised residuals
/// `diag(r)^-1/2 (P − r cᵀ) diag(c)^-1/2`. All axes with inertia above
/// 1e-12 are kept, each signed so that its first nonzero coordinate is
/// positive. A table with no such axis (the independence model) yields one
/// all-zero axis of inertia 0.
pub fn correspondence_analysis(f: &FrequencyTable) -> Result<FactorCoordinates> {
    if let Some(&i) = f.zero_mass_rows().first() {
        return Err(Error::invalid(format!("{} has zero mass", f.row_name(i))));
    }
    if let Some(&j) = f.zero_mass_cols().first() {
        return Err(Error::invalid(format!(
            "column {} ({}) has zero mass",
            j + 1,
            f.counts().col_ids()[j]
        )));
    }
    let x = f.counts();
    let (r, c) = x.shape();
    let total = f.total();
    let rm: Vec<f64> = f.row_sums().iter().map(|s| s / total).collect();
    let cm: Vec<f64> = f.col_sums().iter().map(|s| s / total).collect();
    let s = DMatrix::from_fn(r, c, |i, j| {
        (x.get(i, j) / total - rm[i] * cm[j]) / (rm[i] * cm[j]).sqrt()
    });
    // Left singular vectors and values of S from the eigenpairs of S Sᵀ.
    let eig = (&s * s.transpose()).symmetric_eigen();
    let u = eig.eigenvectors;
    let mut axes: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &ev)| ev > MIN_INERTIA)
        .map(|(a, &ev)| (ev.sqrt(), a))
        .collect();
    axes.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));

    let row_ids = x.row_ids().map(<[String]>::to_vec);
    if axes.is_empty() {
        let coords = DataMatrix::zeros(r, 1)?
            .with_col_ids(vec!["F1".into()])?
            .with_row_ids(row_ids)?;
        return Ok(FactorCoordinates {
            coords,
            inertias: vec![0.0],
        });
    }
    let nf = axes.len();
    let mut values = vec![0.0; r * nf];
    for (a, &(sv, col)) in axes.iter().enumerate() {
        let column: Vec<f64> = (0..r).map(|i| u[(i, col)] * sv / rm[i].sqrt()).collect();
        let sign = column
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map_or(1.0, |v| v.signum());
        for (i, v) in column.into_iter().enumerate() {
            values[i * nf + a] = sign * v;
        }
    }
    let coords = DataMatrix::new(r, nf, values)?
        .with_col_ids((1..=nf).map(|a| format!("F{a}")).collect())?
        .with_row_ids(row_ids)?;
    Ok(FactorCoordinates {
        coords,
        inertias: axes.iter().map(|(sv, _)| sv * sv).collect(),
    })
}

/// Lowercased runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|ch: char| !ch.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// `counts[i][j]` is the number of case-folded occurrences of `vocab[i]` in
/// chunk `j`.
pub fn term_frequency_matrix<S: AsRef<str>, T: AsRef<str>>(
    chunks: &[Vec<S>],
    vocab: &[T],
) -> Result<FrequencyTable> {
    if chunks.is_empty() {
        return Err(Error::invalid("no chunks given"));
    }
    if vocab.is_empty() {
        return Err(Error::invalid("empty vocabulary"));
    }
    let terms: Vec<String> = vocab.iter().map(|t| t.as_ref().to_lowercase()).collect();
    let index: std::collections::HashMap<&str, usize> =
        terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let c = chunks.len();
    let mut values = vec![0.0; terms.len() * c];
    for (j, chunk) in chunks.iter().enumerate() {
        for tok in chunk {
            if let Some(&i) = index.get(tok.as_ref().to_lowercase().as_str()) {
                values[i * c + j] += 1.0;
            }
        }
    }
    let counts = DataMatrix::new(terms.len(), c, values)?
        .with_col_ids((1..=c).map(|j| format!("chunk{j}")).collect())?
        .with_row_ids(Some(vocab.iter().map(|t| t.as_ref().to_string()).collect()))?;
    FrequencyTable::new(counts)
}
