//! Tree condensation by detail norm, partition extraction and a k-means
//! benchmark for the resulting cuts.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::haar::HaarDecomposition;
use crate::hierarchy::io::{fmt_real, parse_table, write_table};
use crate::hierarchy::{Dendrogram, Node};
use crate::matrix::DataMatrix;
use crate::parallel::Parallelism;
use crate::tsv;

/// Euclidean norm of every detail row, in merge order.
pub fn detail_norms(h: &HaarDecomposition) -> Vec<f64> {
    (0..h.dendrogram().merges().len())
        .map(|k| h.detail(k).iter().map(|d| d * d).sum::<f64>().sqrt())
        .collect()
}

/// A dendrogram whose insignificant merges have been tied to the level of the
/// merge before them, which turns it into a multiway tree.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedHierarchy {
    base: Dendrogram,
    adjusted_levels: Vec<f64>,
    collapsed: Vec<bool>,
}

impl CondensedHierarchy {
    /// Builds the adjusted levels from a collapse mask.
    pub fn new(base: Dendrogram, collapsed: Vec<bool>) -> Result<Self> {
        if collapsed.len() != base.merges().len() {
            return Err(Error::invalid(format!(
                "collapse mask has {} entries, tree has {} merges",
                collapsed.len(),
                base.merges().len()
            )));
        }
        let mut adjusted_levels = Vec::with_capacity(collapsed.len());
        for (k, m) in base.merges().iter().enumerate() {
            let level = if collapsed[k] {
                adjusted_levels.last().copied().unwrap_or(0.0)
            } else {
                m.level
            };
            adjusted_levels.push(level);
        }
        Ok(CondensedHierarchy {
            base,
            adjusted_levels,
            collapsed,
        })
    }

    pub fn base(&self) -> &Dendrogram {
        &self.base
    }

    pub fn adjusted_levels(&self) -> &[f64] {
        &self.adjusted_levels
    }

    /// `collapsed()[k]` is true when merge `k` (zero-based) was collapsed.
    pub fn collapsed(&self) -> &[bool] {
        &self.collapsed
    }

    pub fn collapsed_count(&self) -> usize {
        self.collapsed.iter().filter(|&&c| c).count()
    }

    /// The base tree carrying the adjusted levels.
    pub fn adjusted_dendrogram(&self) -> Dendrogram {
        self.base
            .with_levels(&self.adjusted_levels)
            .expect("adjusted levels are finite and nonnegative")
    }

    /// Dendrogram text form with extra `adjusted_level` and `collapsed` columns.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .adjusted_levels
            .iter()
            .zip(&self.collapsed)
            .map(|(&l, &c)| vec![fmt_real(l), c.to_string()])
            .collect();
        write_table(&self.base, &["adjusted_level", "collapsed"], &cells)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let table = parse_table(text)?;
        let col = |name: &str| {
            table
                .extra_columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::parse(4, None, format!("missing column {name:?}")))
        };
        let (lc, cc) = (col("adjusted_level")?, col("collapsed")?);
        let mut levels = Vec::new();
        let mut collapsed = Vec::new();
        for cells in &table.extra_cells {
            let (line, l) = &cells[lc];
            levels.push(
                l.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(*line, Some(5 + lc), "bad adjusted level"))?,
            );
            let (line, c) = &cells[cc];
            collapsed.push(
                c.parse::<bool>()
                    .map_err(|_| Error::parse(*line, Some(5 + cc), "collapsed must be true or false"))?,
            );
        }
        let condensed = CondensedHierarchy::new(table.dendrogram, collapsed)?;
        if let Some(k) = (0..levels.len()).find(|&k| levels[k] != condensed.adjusted_levels[k]) {
            return Err(Error::invalid(format!(
                "adjusted level of merge q{} does not follow from the collapse flags",
                k + 1
            )));
        }
        Ok(condensed)
    }
}

/// Zeroes every detail row whose norm is strictly below `tau` and ties the
/// corresponding merges to the previous adjusted level.
pub fn condense(h: &HaarDecomposition, tau: f64) -> Result<(CondensedHierarchy, HaarDecomposition)> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::invalid(format!("tau must be nonnegative, got {tau}")));
    }
    let collapsed: Vec<bool> = detail_norms(h).iter().map(|&nrm| nrm < tau).collect();
    let m = h.cols();
    let mut details = h.details().to_vec();
    for (k, _) in collapsed.iter().enumerate().filter(|(_, &c)| c) {
        details[k * m..(k + 1) * m].fill(0.0);
    }
    let filtered = h.with_coefficients(details, h.final_smooth().to_vec())?;
    Ok((CondensedHierarchy::new(h.dendrogram().clone(), collapsed)?, filtered))
}

/// Cluster labels `0..k`, numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Relabels arbitrary cluster ids into first-appearance order.
    pub fn from_labels(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::invalid("partition of an empty set"));
        }
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&r| {
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect();
        Ok(Partition { labels, k: map.len() })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            k: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of clusters.
    pub fn cardinality(&self) -> usize {
        self.k
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// True when every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut owner = vec![None; self.k];
        self.labels.iter().zip(&coarser.labels).all(|(&a, &b)| {
            *owner[a].get_or_insert(b) == b
        })
    }
}

/// One horizontal cut of a condensed tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub level: f64,
    pub partition: Partition,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// One partition per distinct adjusted level carried by a retained merge,
/// ascending. A cut at `l` applies every merge (collapsed or not) whose
/// adjusted level is at most `l`. When every merge is collapsed the single
/// one-cluster partition at level 0 is returned. Applying a merge joins all
/// of its terminals, so partitions stay nested even when levels invert.
pub fn unique_partitions(c: &CondensedHierarchy) -> Vec<Cut> {
    let d = c.base();
    let n = d.n();
    let mut levels: Vec<f64> = c
        .adjusted_levels
        .iter()
        .zip(&c.collapsed)
        .filter(|(_, &col)| !col)
        .map(|(&l, _)| l)
        .collect();
    if levels.is_empty() {
        levels.push(0.0);
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let members: Vec<Vec<usize>> = (0..d.merges().len())
        .map(|k| d.cluster_members(Node::Merge(k)).expect("merge exists"))
        .collect();
    let mut order: Vec<usize> = (0..d.merges().len()).collect();
    order.sort_by(|&a, &b| c.adjusted_levels[a].total_cmp(&c.adjusted_levels[b]).then(a.cmp(&b)));

    let mut parent: Vec<usize> = (0..n).collect();
    let mut next = 0;
    levels
        .into_iter()
        .map(|level| {
            while next < order.len() && c.adjusted_levels[order[next]] <= level {
                let leaves = &members[order[next]];
                for &i in &leaves[1..] {
                    let (a, b) = (find(&mut parent, leaves[0]), find(&mut parent, i));
                    parent[a.max(b)] = a.min(b);
                }
                next += 1;
            }
            let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
            Cut {
                level,
                partition: Partition::from_labels(&roots).expect("n >= 2"),
            }
        })
        .collect()
}

fn check_partition(x: &DataMatrix, p: &Partition) -> Result<()> {
    if p.len() != x.rows() {
        return Err(Error::invalid(format!(
            "partition covers {} observations, matrix has {}",
            p.len(),
            x.rows()
        )));
    }
    Ok(())
}

fn centroids(x: &DataMatrix, labels: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let m = x.cols();
    let mut sums = vec![0.0; k * m];
    let mut sizes = vec![0usize; k];
    for (row, &l) in x.iter_rows().zip(labels) {
        sizes[l] += 1;
        for (s, v) in sums[l * m..(l + 1) * m].iter_mut().zip(row) {
            *s += v;
        }
    }
    for (l, &size) in sizes.iter().enumerate() {
        if size > 0 {
            sums[l * m..(l + 1) * m].iter_mut().for_each(|s| *s /= size as f64);
        }
    }
    (sums, sizes)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn cluster_ss(x: &DataMatrix, p: &Partition) -> Vec<f64> {
    let m = x.cols();
    let (cent, _) = centroids(x, &p.labels, p.k);
    let mut ss = vec![0.0; p.k];
    for (row, &l) in x.iter_rows().zip(&p.labels) {
        ss[l] += sq_dist(row, &cent[l * m..(l + 1) * m]);
    }
    ss
}

/// Sum over clusters of squared distances to the cluster centroid.
pub fn partition_ss(x: &DataMatrix, p: &Partition) -> Result<f64> {
    check_partition(x, p)?;
    Ok(cluster_ss(x, p).iter().sum())
}

/// Mean over clusters of the within-cluster variance `SS_q / |q|`.
pub fn average_cluster_variance(x: &DataMatrix, p: &Partition) -> Result<f64> {
    check_partition(x, p)?;
    let sizes: Vec<usize> = p.clusters().iter().map(Vec::len).collect();
    let total: f64 = cluster_ss(x, p)
        .iter()
        .zip(&sizes)
        .map(|(ss, &s)| ss / s as f64)
        .sum();
    Ok(total / p.k as f64)
}

pub const DEFAULT_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub partition: Partition,
    pub ss: f64,
    /// Index of the restart that produced the result.
    pub restart: usize,
}

pub fn kmeans(x: &DataMatrix, k: usize, seed: u64, restarts: usize) -> Result<KMeans> {
    kmeans_with(x, k, seed, restarts, Parallelism::default())
}

/// Within-cluster SS minimisation: nearest-centroid iterations followed by
/// single-point transfers until no move lowers the SS. Restart `r` seeds
/// `k` distinct rows from `ChaCha8Rng::seed_from_u64(seed)` on stream `r`.
/// The lowest SS wins; ties go to the lower restart index.
pub fn kmeans_with(
    x: &DataMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    par: Parallelism,
) -> Result<KMeans> {
    let n = x.rows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k must be in 1..={n}, got {k}")));
    }
    if restarts == 0 {
        return Err(Error::invalid("at least one restart is needed"));
    }
    let runs = par.map_range(restarts, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let init: Vec<usize> = sample(&mut rng, n, k).into_vec();
        let labels = relocate(x, k, &init);
        let partition = Partition::from_labels(&labels).expect("n >= 1");
        let ss: f64 = cluster_ss(x, &partition).iter().sum();
        (partition, ss)
    });
    let (restart, (partition, ss)) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cand| if cand.1 .1 < best.1 .1 { cand } else { best })
        .expect("restarts >= 1");
    Ok(KMeans {
        partition,
        ss,
        restart,
    })
}

fn nearest(row: &[f64], cent: &[f64], m: usize, k: usize) -> usize {
    (0..k)
        .map(|c| (sq_dist(row, &cent[c * m..(c + 1) * m]), c))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("k >= 1")
        .1
}

fn relocate(x: &DataMatrix, k: usize, init: &[usize]) -> Vec<usize> {
    let (n, m) = x.shape();
    let mut cent: Vec<f64> = init.iter().flat_map(|&i| x.row(i).iter().copied()).collect();
    let mut labels = vec![usize::MAX; n];

    for _ in 0..100 {
        let next: Vec<usize> = x.iter_rows().map(|r| nearest(r, &cent, m, k)).collect();
        let mut next = next;
        fill_empty(x, &mut next, &cent, k);
        if next == labels {
            break;
        }
        labels = next;
        cent = centroids(x, &labels, k).0;
    }

    let (mut cent, mut sizes) = centroids(x, &labels, k);
    let mut moved = true;
    let mut passes = 0;
    while moved && passes < 1000 {
        moved = false;
        passes += 1;
        for i in 0..n {
            let a = labels[i];
            if sizes[a] < 2 {
                continue;
            }
            let row = x.row(i);
            let na = sizes[a] as f64;
            let remove = na / (na - 1.0) * sq_dist(row, &cent[a * m..(a + 1) * m]);
            let best = (0..k)
                .filter(|&b| b != a)
                .map(|b| {
                    let nb = sizes[b] as f64;
                    (nb / (nb + 1.0) * sq_dist(row, &cent[b * m..(b + 1) * m]), b)
                })
                .min_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            let Some((add, b)) = best else { continue };
            if add < remove * (1.0 - 1e-12) {
                let nb = sizes[b] as f64;
                for j in 0..m {
                    let v = row[j];
                    cent[a * m + j] = (cent[a * m + j] * na - v) / (na - 1.0);
                    cent[b * m + j] = (cent[b * m + j] * nb + v) / (nb + 1.0);
                }
                sizes[a] -= 1;
                sizes[b] += 1;
                labels[i] = b;
                moved = true;
            }
        }
    }
    labels
}

/// Gives every empty cluster the point farthest from its own centroid,
/// taken from a cluster that keeps at least one member.
fn fill_empty(x: &DataMatrix, labels: &mut [usize], cent: &[f64], k: usize) {
    let m = x.cols();
    loop {
        let mut sizes = vec![0usize; k];
        labels.iter().for_each(|&l| sizes[l] += 1);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .max_by(|&i, &j| {
                let di = sq_dist(x.row(i), &cent[labels[i] * m..(labels[i] + 1) * m]);
                let dj = sq_dist(x.row(j), &cent[labels[j] * m..(labels[j] + 1) * m]);
                di.total_cmp(&dj).then(j.cmp(&i))
            })
            .expect("k <= n leaves a donor");
        labels[donor] = empty;
    }
}

/// One line of the partition benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub level: f64,
    pub multiway_ss: f64,
    pub cardinality: usize,
    pub kmeans_ss: f64,
}

/// Compares every unique cut with k-means at the same number of clusters.
pub fn benchmark(
    c: &CondensedHierarchy,
    x: &DataMatrix,
    seed: u64,
    restarts: usize,
) -> Result<Vec<BenchmarkRow>> {
    benchmark_with(c, x, seed, restarts, Parallelism::default())
}

pub fn benchmark_with(
    c: &CondensedHierarchy,
    x: &DataMatrix,
    seed: u64,
    restarts: usize,
    par: Parallelism,
) -> Result<Vec<BenchmarkRow>> {
    if x.rows() != c.base().n() {
        return Err(Error::invalid(format!(
            "tree has {} terminals, matrix has {} rows",
            c.base().n(),
            x.rows()
        )));
    }
    unique_partitions(c)
        .into_iter()
        .map(|cut| {
            let k = cut.partition.cardinality();
            Ok(BenchmarkRow {
                level: cut.level,
                multiway_ss: partition_ss(x, &cut.partition)?,
                cardinality: k,
                kmeans_ss: kmeans_with(x, k, seed, restarts, par)?.ss,
            })
        })
        .collect()
}

pub fn benchmark_tsv(rows: &[BenchmarkRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                tsv::format_sig(r.level, 6),
                tsv::format_sig(r.multiway_ss, 6),
                r.cardinality.to_string(),
                tsv::format_sig(r.kmeans_ss, 6),
            ]
        })
        .collect();
    tsv::render(&["level", "multiway_ss", "cardinality", "kmeans_ss"], &body)
}
