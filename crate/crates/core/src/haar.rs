//! Forward and inverse Haar wavelet transform over a dendrogram.
//!
//! Walking the merges in order, every internal node `q = left ∪ right` gets
//!
//! ```text
//! s(q) = ½ (s(left) + s(right))      smooth
//! d(q) = ½ (s(left) − s(right))      detail
//! ```
//!
//! with `s(i)` the `i`-th data row for a terminal. The `n − 1` details and the
//! root smooth reconstruct the data exactly: `s(left) = s(q) + d(q)` and
//! `s(right) = s(q) − d(q)`. Equivalently `X = C·D + S`, where `C` is the
//! ternary [`CharacteristicMatrix`] of the tree.

use crate::error::{Error, Result};
use crate::hierarchy::{canonical_pair, Dendrogram, Node};
use crate::matrix::DataMatrix;

mod io;

/// Which child of a merge is "left" (its detail sign is `+`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Two terminals by row index, two internal nodes by merge order, and a
    /// terminal against an internal node by smallest contained terminal.
    #[default]
    Canonical,
    /// Use each merge's `left`/`right` fields as stored.
    AsRecorded,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::Canonical => "canonical",
            Orientation::AsRecorded => "as_recorded",
        }
    }
}

/// `(left, right)` children of every merge under `orientation`.
pub(crate) fn oriented_children(d: &Dendrogram, orientation: Orientation) -> Vec<(Node, Node)> {
    match orientation {
        Orientation::AsRecorded => d.merges().iter().map(|m| (m.left, m.right)).collect(),
        Orientation::Canonical => {
            let min_leaf = d.min_leaves();
            let of = |node: Node| match node {
                Node::Leaf(i) => i,
                Node::Merge(k) => min_leaf[k],
            };
            d.merges()
                .iter()
                .map(|m| canonical_pair(m.left, m.right, of))
                .collect()
        }
    }
}

/// Detail rows `d(q_1)..d(q_{n-1})` plus the root smooth, together with the
/// tree and orientation needed to invert them.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarDecomposition {
    cols: usize,
    details: Vec<f64>,
    final_smooth: Vec<f64>,
    dendrogram: Dendrogram,
    orientation: Orientation,
    col_ids: Vec<String>,
    row_ids: Option<Vec<String>>,
}

impl HaarDecomposition {
    /// Assembles a decomposition from parts. `details` is row-major with one
    /// row per merge.
    pub fn from_parts(
        dendrogram: Dendrogram,
        orientation: Orientation,
        details: Vec<f64>,
        final_smooth: Vec<f64>,
    ) -> Result<Self> {
        let cols = final_smooth.len();
        let rows = dendrogram.merges().len();
        if cols == 0 {
            return Err(Error::invalid("final smooth is empty"));
        }
        if details.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {rows}x{cols} detail values, got {}",
                details.len()
            )));
        }
        if details.iter().chain(&final_smooth).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(HaarDecomposition {
            cols,
            details,
            final_smooth,
            dendrogram,
            orientation,
            col_ids: (1..=cols).map(|j| format!("c{j}")).collect(),
            row_ids: None,
        })
    }

    pub(crate) fn with_labels(mut self, col_ids: Vec<String>, row_ids: Option<Vec<String>>) -> Result<Self> {
        if col_ids.len() != self.cols {
            return Err(Error::invalid("column id count does not match width"));
        }
        if row_ids.as_ref().is_some_and(|r| r.len() != self.dendrogram.n()) {
            return Err(Error::invalid("row id count does not match tree size"));
        }
        self.col_ids = col_ids;
        self.row_ids = row_ids;
        Ok(self)
    }

    /// Same tree and labels, new coefficients.
    pub fn with_coefficients(&self, details: Vec<f64>, final_smooth: Vec<f64>) -> Result<Self> {
        HaarDecomposition::from_parts(
            self.dendrogram.clone(),
            self.orientation,
            details,
            final_smooth,
        )?
        .with_labels(self.col_ids.clone(), self.row_ids.clone())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major `(n − 1) × m` detail matrix, row `k` = `d(q_{k+1})`.
    pub fn details(&self) -> &[f64] {
        &self.details
    }

    pub fn detail(&self, k: usize) -> &[f64] {
        &self.details[k * self.cols..(k + 1) * self.cols]
    }

    pub fn final_smooth(&self) -> &[f64] {
        &self.final_smooth
    }

    pub fn dendrogram(&self) -> &Dendrogram {
        &self.dendrogram
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn row_ids(&self) -> Option<&[String]> {
        self.row_ids.as_deref()
    }

    /// All coefficients as an `n × m` matrix: the detail rows followed by the
    /// final smooth.
    pub fn coefficient_matrix(&self) -> DataMatrix {
        let mut values = self.details.clone();
        values.extend_from_slice(&self.final_smooth);
        DataMatrix::new(self.dendrogram.n(), self.cols, values)
            .expect("coefficients are finite and non-empty")
    }
}

/// Forward transform with the canonical orientation.
pub fn forward(x: &DataMatrix, d: &Dendrogram) -> Result<HaarDecomposition> {
    forward_with(x, d, Orientation::Canonical)
}

pub fn forward_with(
    x: &DataMatrix,
    d: &Dendrogram,
    orientation: Orientation,
) -> Result<HaarDecomposition> {
    if x.rows() != d.n() {
        return Err(Error::invalid(format!(
            "data has {} rows but the tree has {} terminals",
            x.rows(),
            d.n()
        )));
    }
    let m = x.cols();
    let children = oriented_children(d, orientation);
    let mut smooth = vec![0.0; children.len() * m];
    let mut details = vec![0.0; children.len() * m];
    for (k, &(left, right)) in children.iter().enumerate() {
        let (done, rest) = smooth.split_at_mut(k * m);
        let get = |node: Node| match node {
            Node::Leaf(i) => x.row(i),
            Node::Merge(j) => &done[j * m..(j + 1) * m],
        };
        let (a, b) = (get(left), get(right));
        let s = &mut rest[..m];
        let dk = &mut details[k * m..(k + 1) * m];
        for j in 0..m {
            s[j] = 0.5 * (a[j] + b[j]);
            dk[j] = 0.5 * (a[j] - b[j]);
        }
    }
    let final_smooth = smooth[smooth.len() - m..].to_vec();
    HaarDecomposition::from_parts(d.clone(), orientation, details, final_smooth)?
        .with_labels(x.col_ids().to_vec(), x.row_ids().map(<[String]>::to_vec))
}

/// Unfolds the tree from the root smooth down to the terminals.
pub fn inverse(h: &HaarDecomposition) -> Result<DataMatrix> {
    let d = &h.dendrogram;
    let (n, m) = (d.n(), h.cols);
    let merges = d.merges().len();
    if merges + 1 != n || h.details.len() != merges * m || h.final_smooth.len() != m {
        return Err(Error::invalid("decomposition shape does not match its tree"));
    }
    let children = oriented_children(d, h.orientation);
    let mut internal = vec![0.0; merges * m];
    internal[(merges - 1) * m..].copy_from_slice(&h.final_smooth);
    let mut out = vec![0.0; n * m];
    for k in (0..merges).rev() {
        let (left, right) = children[k];
        let (lower, upper) = internal.split_at_mut(k * m);
        let s = &upper[..m];
        let dk = h.detail(k);
        for (child, sign) in [(left, 1.0), (right, -1.0)] {
            let target = match child {
                Node::Leaf(i) => &mut out[i * m..(i + 1) * m],
                Node::Merge(j) => &mut lower[j * m..(j + 1) * m],
            };
            for j in 0..m {
                target[j] = s[j] + sign * dk[j];
            }
        }
    }
    DataMatrix::new(n, m, out)?
        .with_col_ids(h.col_ids.clone())?
        .with_row_ids(h.row_ids.clone())
}

/// Smooth of an arbitrary node, recovered by unfolding along the root path.
pub fn node_smooth(h: &HaarDecomposition, node: Node) -> Result<Vec<f64>> {
    let d = &h.dendrogram;
    let known = match node {
        Node::Leaf(i) => i < d.n(),
        Node::Merge(k) => k < d.merges().len(),
    };
    if !known {
        return Err(Error::NotFound(format!("node {node}")));
    }
    let children = oriented_children(d, h.orientation);
    let parents = d.parents();
    let mut path = Vec::new();
    let mut cur = node;
    while let Some(p) = parents[d.slot(cur)] {
        path.push((p, cur));
        cur = Node::Merge(p);
    }
    let mut s = h.final_smooth.clone();
    for &(p, child) in path.iter().rev() {
        let sign = if children[p].0 == child { 1.0 } else { -1.0 };
        for (v, dv) in s.iter_mut().zip(h.detail(p)) {
            *v += sign * dv;
        }
    }
    Ok(s)
}

/// `n × (n − 1)` branch-code matrix: column `k` is `+1` on the left child's
/// terminals of merge `k`, `−1` on the right child's, `0` elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl CharacteristicMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * (self.n - 1) + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * (self.n - 1)..(i + 1) * (self.n - 1)]
    }

    /// Terminals with a nonzero entry in column `j`.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i, j) != 0).collect()
    }
}

pub fn characteristic_matrix(d: &Dendrogram) -> CharacteristicMatrix {
    characteristic_matrix_with(d, Orientation::Canonical)
}

pub fn characteristic_matrix_with(d: &Dendrogram, orientation: Orientation) -> CharacteristicMatrix {
    let n = d.n();
    let cols = n - 1;
    let children = oriented_children(d, orientation);
    let parents = d.parents();
    let mut entries = vec![0i8; n * cols];
    for i in 0..n {
        let mut cur = Node::Leaf(i);
        while let Some(p) = parents[d.slot(cur)] {
            entries[i * cols + p] = if children[p].0 == cur { 1 } else { -1 };
            cur = Node::Merge(p);
        }
    }
    CharacteristicMatrix { n, entries }
}

/// `C·D + S`, with `S` the final smooth repeated on every row.
pub fn reconstruct_matrix_form(
    c: &CharacteristicMatrix,
    details: &[f64],
    final_smooth: &[f64],
) -> Result<DataMatrix> {
    let (n, m) = (c.n, final_smooth.len());
    if m == 0 || details.len() != (n - 1) * m {
        return Err(Error::invalid(format!(
            "expected a {}x{m} detail matrix for a {n}x{} characteristic matrix",
            n - 1,
            n - 1
        )));
    }
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        let mut row = final_smooth.to_vec();
        for (k, &code) in c.row(i).iter().enumerate() {
            if code != 0 {
                let sign = f64::from(code);
                for (v, dv) in row.iter_mut().zip(&details[k * m..(k + 1) * m]) {
                    *v += sign * dv;
                }
            }
        }
        out.extend(row);
    }
    DataMatrix::new(n, m, out)
}
