//! Ranked binary dendrograms built by agglomerative clustering.
//!
//! Nodes are numbered the way the text format prints them: terminals
//! `1..=n` in row order, internal nodes `q1..q(n-1)` in merge order. In the
//! Rust API both are zero-based ([`Node::Leaf`] and [`Node::Merge`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::parallel::Parallelism;

pub(crate) mod io;
mod validate;

pub use validate::{Issue, ValidationReport};

/// Agglomerative criterion, each realised by its Lance–Williams update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Minimum variance. Initial dissimilarity `½‖x_i − x_j‖²`, so every level
    /// is the increase in within-cluster sum of squares caused by the merge.
    Ward,
    /// Gower's median method on squared Euclidean distances. Levels may invert.
    Median,
    /// Weighted (½, ½) average of Euclidean distances, independent of cluster sizes.
    UnweightedAverage,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [
        Criterion::Ward,
        Criterion::Median,
        Criterion::UnweightedAverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Ward => "ward",
            Criterion::Median => "median",
            Criterion::UnweightedAverage => "unweighted_average",
        }
    }

    fn initial(self, a: &[f64], b: &[f64]) -> f64 {
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        match self {
            Criterion::Ward => 0.5 * sq,
            Criterion::Median => sq,
            Criterion::UnweightedAverage => sq.sqrt(),
        }
    }

    /// Dissimilarity between cluster `k` and the union of `i` and `j`.
    #[inline]
    fn update(self, d_ki: f64, d_kj: f64, d_ij: f64, n_k: usize, n_i: usize, n_j: usize) -> f64 {
        match self {
            Criterion::Ward => {
                let (nk, ni, nj) = (n_k as f64, n_i as f64, n_j as f64);
                ((nk + ni) * d_ki + (nk + nj) * d_kj - nk * d_ij) / (nk + ni + nj)
            }
            // exact value is a squared distance; clamp rounding below zero
            Criterion::Median => (0.5 * d_ki + 0.5 * d_kj - 0.25 * d_ij).max(0.0),
            Criterion::UnweightedAverage => 0.5 * d_ki + 0.5 * d_kj,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ward" | "minimum_variance" => Ok(Criterion::Ward),
            "median" => Ok(Criterion::Median),
            "unweighted_average" | "average" | "wpgma" => Ok(Criterion::UnweightedAverage),
            _ => Err(Error::invalid(format!("unknown criterion {s:?}"))),
        }
    }
}

/// A node of a dendrogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    /// Terminal node for data row `i` (zero-based).
    Leaf(usize),
    /// Internal node created by merge `k` (zero-based), printed `q{k+1}`.
    Merge(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Leaf(i) => write!(f, "{}", i + 1),
            Node::Merge(k) => write!(f, "q{}", k + 1),
        }
    }
}

impl FromStr for Node {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (internal, digits) = match s.strip_prefix('q') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        match digits.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(if internal {
                Node::Merge(v - 1)
            } else {
                Node::Leaf(v - 1)
            }),
            _ => Err(format!("bad node reference {s:?}")),
        }
    }
}

/// One agglomeration: `left ∪ right` at dissimilarity `level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub left: Node,
    pub right: Node,
    pub level: f64,
}

/// A ranked binary tree over `n` terminals given as `n − 1` ordered merges.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    criterion: Criterion,
    merges: Vec<MergeStep>,
}

impl Dendrogram {
    /// Builds a dendrogram and rejects it unless it is a well-formed tree.
    /// Level inversions are allowed.
    pub fn new(n: usize, criterion: Criterion, merges: Vec<MergeStep>) -> Result<Self> {
        let d = Dendrogram::from_raw(n, criterion, merges);
        let report = d.validate();
        if let Some(issue) = report.issues.first() {
            return Err(Error::invalid(format!("malformed dendrogram: {issue}")));
        }
        Ok(d)
    }

    /// Wraps merges without any checking; see [`Dendrogram::validate`].
    pub fn from_raw(n: usize, criterion: Criterion, merges: Vec<MergeStep>) -> Self {
        Dendrogram {
            n,
            criterion,
            merges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn merges(&self) -> &[MergeStep] {
        &self.merges
    }

    pub fn levels(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.level).collect()
    }

    pub fn root(&self) -> Node {
        Node::Merge(self.merges.len() - 1)
    }

    /// Same tree with new level values (merge order untouched).
    pub fn with_levels(&self, levels: &[f64]) -> Result<Dendrogram> {
        if levels.len() != self.merges.len() {
            return Err(Error::invalid("level count does not match merge count"));
        }
        let merges = self
            .merges
            .iter()
            .zip(levels)
            .map(|(m, &level)| MergeStep { level, ..*m })
            .collect();
        Ok(Dendrogram::from_raw(self.n, self.criterion, merges))
    }

    /// Terminals of `node`, ascending and zero-based.
    pub fn cluster_members(&self, node: Node) -> Result<Vec<usize>> {
        match node {
            Node::Leaf(i) if i < self.n => Ok(vec![i]),
            Node::Merge(k) if k < self.merges.len() => {
                let mut out = Vec::new();
                let mut stack = vec![node];
                while let Some(top) = stack.pop() {
                    match top {
                        Node::Leaf(i) => out.push(i),
                        Node::Merge(k) => {
                            let m = &self.merges[k];
                            stack.push(m.left);
                            stack.push(m.right);
                        }
                    }
                }
                out.sort_unstable();
                Ok(out)
            }
            _ => Err(Error::NotFound(format!("node {node} in a tree on {} terminals", self.n))),
        }
    }

    /// Smallest terminal index under each merge node.
    pub(crate) fn min_leaves(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(self.merges.len());
        for m in &self.merges {
            let of = |node: Node| match node {
                Node::Leaf(i) => i,
                Node::Merge(k) => out[k],
            };
            out.push(of(m.left).min(of(m.right)));
        }
        out
    }

    /// Parent merge of every leaf (`0..n`) and every merge (`n..2n-1`); root has none.
    pub(crate) fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n + self.merges.len()];
        for (k, m) in self.merges.iter().enumerate() {
            for child in [m.left, m.right] {
                parent[self.slot(child)] = Some(k);
            }
        }
        parent
    }

    pub(crate) fn slot(&self, node: Node) -> usize {
        match node {
            Node::Leaf(i) => i,
            Node::Merge(k) => self.n + k,
        }
    }
}

/// Orders two children by the fixed left/right rule: two terminals by index,
/// two internal nodes by merge order, and a terminal against an internal node
/// by their smallest terminal index.
pub(crate) fn canonical_pair(a: Node, b: Node, min_leaf: impl Fn(Node) -> usize) -> (Node, Node) {
    let a_first = match (a, b) {
        (Node::Leaf(x), Node::Leaf(y)) => x < y,
        (Node::Merge(x), Node::Merge(y)) => x < y,
        _ => min_leaf(a) < min_leaf(b),
    };
    if a_first {
        (a, b)
    } else {
        (b, a)
    }
}

/// Agglomerative clustering of the rows of `x`.
pub fn build_hierarchy(x: &DataMatrix, criterion: Criterion) -> Result<Dendrogram> {
    build_hierarchy_with(x, criterion, Parallelism::default())
}

/// [`build_hierarchy`] with an explicit execution strategy.
///
/// Stored-matrix algorithm with a nearest-neighbour list: each step takes the
/// globally least `(dissimilarity, tie key)` pair, where the tie key is the
/// pair's node numbers `(smaller, larger)` with terminals numbered `1..=n` and
/// merge `k` numbered `n + k`. Only rows whose neighbour was consumed are
/// rescanned.
pub fn build_hierarchy_with(
    x: &DataMatrix,
    criterion: Criterion,
    par: Parallelism,
) -> Result<Dendrogram> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::invalid(format!(
            "clustering needs at least 2 observations, got {n}"
        )));
    }

    let mut dist = vec![0.0f64; n * n];
    par.for_each_chunk_mut(&mut dist, n, |i, row| {
        let xi = x.row(i);
        for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
            *slot = criterion.initial(xi, x.row(j));
        }
    });
    for i in 0..n {
        for j in 0..i {
            dist[i * n + j] = dist[j * n + i];
        }
    }
    if dist.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("dissimilarities overflow; rescale the data"));
    }

    let mut ws = Workspace {
        n,
        dist,
        active: vec![true; n],
        id: (1..=n).collect(),
        size: vec![1; n],
        node: (0..n).map(Node::Leaf).collect(),
        min_leaf: (0..n).collect(),
        nn: vec![(f64::INFINITY, usize::MAX); n],
    };
    ws.nn = par.map_range(n, |s| ws.scan(s));

    let mut merges = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let a = (0..n)
            .filter(|&s| ws.active[s])
            .reduce(|s, t| {
                if ws.better(ws.nn[t].0, t, ws.nn[t].1, ws.nn[s].0, s, ws.nn[s].1) {
                    t
                } else {
                    s
                }
            })
            .expect("at least two active clusters");
        let (d_ab, b) = ws.nn[a];

        let min_leaf_of = |node: Node| {
            let s = if node == ws.node[a] { a } else { b };
            ws.min_leaf[s]
        };
        let (left, right) = canonical_pair(ws.node[a], ws.node[b], min_leaf_of);
        merges.push(MergeStep {
            left,
            right,
            level: d_ab,
        });

        let fresh: Vec<f64> = par.map_range(n, |t| {
            if !ws.active[t] || t == a || t == b {
                return f64::NAN;
            }
            criterion.update(
                ws.dist[t * n + a],
                ws.dist[t * n + b],
                d_ab,
                ws.size[t],
                ws.size[a],
                ws.size[b],
            )
        });
        for (t, &d) in fresh.iter().enumerate() {
            if ws.active[t] && t != a && t != b {
                ws.dist[a * n + t] = d;
                ws.dist[t * n + a] = d;
            }
        }
        ws.active[b] = false;
        ws.id[a] = n + k + 1;
        ws.size[a] += ws.size[b];
        ws.node[a] = Node::Merge(k);
        ws.min_leaf[a] = ws.min_leaf[a].min(ws.min_leaf[b]);

        if k + 2 == n {
            break;
        }
        let updated = par.map_range(n, |t| {
            if !ws.active[t] {
                return ws.nn[t];
            }
            let (cur_d, cur) = ws.nn[t];
            if t == a || cur == a || cur == b {
                ws.scan(t)
            } else if ws.better(fresh[t], t, a, cur_d, t, cur) {
                (fresh[t], a)
            } else {
                ws.nn[t]
            }
        });
        ws.nn = updated;
    }

    Ok(Dendrogram::from_raw(n, criterion, merges))
}

struct Workspace {
    n: usize,
    dist: Vec<f64>,
    active: Vec<bool>,
    /// Tie-break numbering of the cluster held in each slot.
    id: Vec<usize>,
    size: Vec<usize>,
    node: Vec<Node>,
    min_leaf: Vec<usize>,
    /// Nearest active neighbour of each slot: (dissimilarity, slot).
    nn: Vec<(f64, usize)>,
}

impl Workspace {
    fn key(&self, s: usize, t: usize) -> (usize, usize) {
        let (p, q) = (self.id[s], self.id[t]);
        (p.min(q), p.max(q))
    }

    /// Is pair `(s1, t1)` at `d1` strictly preferred to `(s2, t2)` at `d2`?
    fn better(&self, d1: f64, s1: usize, t1: usize, d2: f64, s2: usize, t2: usize) -> bool {
        if t2 == usize::MAX {
            return true;
        }
        if t1 == usize::MAX {
            return false;
        }
        d1 < d2 || (d1 == d2 && self.key(s1, t1) < self.key(s2, t2))
    }

    fn scan(&self, s: usize) -> (f64, usize) {
        let row = &self.dist[s * self.n..(s + 1) * self.n];
        let mut best = (f64::INFINITY, usize::MAX);
        for (t, &d) in row.iter().enumerate() {
            if t != s && self.active[t] && self.better(d, s, t, best.0, s, best.1) {
                best = (d, t);
            }
        }
        best
    }
}
