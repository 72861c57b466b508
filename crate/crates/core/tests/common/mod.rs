//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use hwt::{Criterion, DataMatrix, Dendrogram, MergeStep, Node};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DataMatrix {
    let values = (0..n * m).map(|_| rng.gen_range(-5.0..5.0)).collect();
    DataMatrix::new(n, m, values).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The eight-leaf example tree: q1=(1,2) q2=(q1,3) q3=(4,5) q4=(q3,6)
/// q5=(q2,q4) q6=(7,8) q7=(q5,q6).
pub fn example_tree() -> Dendrogram {
    use Node::{Leaf as L, Merge as Q};
    let steps = [
        (L(0), L(1)),
        (Q(0), L(2)),
        (L(3), L(4)),
        (Q(2), L(5)),
        (Q(1), Q(3)),
        (L(6), L(7)),
        (Q(4), Q(5)),
    ];
    let merges = steps
        .iter()
        .enumerate()
        .map(|(k, &(left, right))| MergeStep {
            left,
            right,
            level: (k + 1) as f64,
        })
        .collect();
    Dendrogram::new(8, Criterion::Ward, merges).unwrap()
}

struct Cluster {
    node: Node,
    seq: usize,
    members: Vec<usize>,
    /// Recursive midpoint of the children's centres.
    centre: Vec<f64>,
    /// Halving weight of every member.
    weight: Vec<f64>,
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn ss(x: &DataMatrix, members: &[usize]) -> f64 {
    let m = x.cols();
    let mut mean = vec![0.0; m];
    for &i in members {
        mean.iter_mut().zip(x.row(i)).for_each(|(s, v)| *s += v);
    }
    mean.iter_mut().for_each(|s| *s /= members.len() as f64);
    members.iter().map(|&i| sq(x.row(i), &mean)).sum()
}

fn dissimilarity(x: &DataMatrix, a: &Cluster, b: &Cluster, c: Criterion) -> f64 {
    match c {
        Criterion::Ward => {
            let mut both = a.members.clone();
            both.extend(&b.members);
            ss(x, &both) - ss(x, &a.members) - ss(x, &b.members)
        }
        Criterion::Median => sq(&a.centre, &b.centre),
        Criterion::UnweightedAverage => {
            let mut total = 0.0;
            for (i, wa) in a.members.iter().zip(&a.weight) {
                for (j, wb) in b.members.iter().zip(&b.weight) {
                    total += wa * wb * sq(x.row(*i), x.row(*j)).sqrt();
                }
            }
            total
        }
    }
}

/// Stepwise agglomeration recomputing every dissimilarity from the cluster
/// contents. Returns unordered child pairs and levels.
pub fn brute_force(x: &DataMatrix, c: Criterion) -> Vec<([Node; 2], f64)> {
    let n = x.rows();
    let mut active: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            node: Node::Leaf(i),
            seq: i,
            members: vec![i],
            centre: x.row(i).to_vec(),
            weight: vec![1.0],
        })
        .collect();
    let mut out = Vec::new();
    for k in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                let d = dissimilarity(x, &active[a], &active[b], c);
                let key = (
                    active[a].seq.min(active[b].seq),
                    active[a].seq.max(active[b].seq),
                );
                let better = match &best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < *bd || (d == *bd && key < *bkey),
                };
                if better {
                    best = Some((d, key, a, b));
                }
            }
        }
        let (level, _, a, b) = best.unwrap();
        let cb = active.remove(b);
        let ca = active.remove(a);
        let mut members = ca.members.clone();
        members.extend(&cb.members);
        let mut weight: Vec<f64> = ca.weight.iter().map(|w| w / 2.0).collect();
        weight.extend(cb.weight.iter().map(|w| w / 2.0));
        let centre = ca
            .centre
            .iter()
            .zip(&cb.centre)
            .map(|(u, v)| 0.5 * (u + v))
            .collect();
        out.push(([ca.node, cb.node], level));
        active.push(Cluster {
            node: Node::Merge(k),
            seq: n + k,
            members,
            centre,
            weight,
        });
    }
    out
}

/// Classic dyadic Haar: final smooth, then details from coarsest to finest.
pub fn dyadic_haar(v: &[f64]) -> Vec<f64> {
    assert!(v.len().is_power_of_two());
    let mut smooth = v.to_vec();
    let mut levels: Vec<Vec<f64>> = Vec::new();
    while smooth.len() > 1 {
        let (s, d): (Vec<f64>, Vec<f64>) = smooth
            .chunks(2)
            .map(|p| (0.5 * (p[0] + p[1]), 0.5 * (p[0] - p[1])))
            .unzip();
        levels.push(d);
        smooth = s;
    }
    let mut out = smooth;
    for d in levels.into_iter().rev() {
        out.extend(d);
    }
    out
}

/// χ² distance between the row profiles `i` and `j` of a count table.
pub fn chi2_distance(counts: &DataMatrix, i: usize, j: usize) -> f64 {
    let total: f64 = counts.values().iter().sum();
    let cols = counts.cols();
    let col_mass: Vec<f64> = (0..cols)
        .map(|c| (0..counts.rows()).map(|r| counts.get(r, c)).sum::<f64>() / total)
        .collect();
    let ri: f64 = counts.row(i).iter().sum();
    let rj: f64 = counts.row(j).iter().sum();
    (0..cols)
        .map(|c| {
            let d = counts.get(i, c) / ri - counts.get(j, c) / rj;
            d * d / col_mass[c]
        })
        .sum::<f64>()
        .sqrt()
}

/// Pearson χ² statistic of a count table.
pub fn chi2_statistic(counts: &DataMatrix) -> f64 {
    let total: f64 = counts.values().iter().sum();
    let (r, c) = counts.shape();
    let rs: Vec<f64> = (0..r).map(|i| counts.row(i).iter().sum()).collect();
    let cs: Vec<f64> = (0..c).map(|j| (0..r).map(|i| counts.get(i, j)).sum()).collect();
    let mut stat = 0.0;
    for i in 0..r {
        for j in 0..c {
            let e = rs[i] * cs[j] / total;
            stat += (counts.get(i, j) - e).powi(2) / e;
        }
    }
    stat
}

/// Smallest within-cluster SS over every split into two nonempty groups.
pub fn best_two_split(x: &DataMatrix) -> f64 {
    let n = x.rows();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << (n - 1)) {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| i > 0 && mask >> (i - 1) & 1 == 1);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        best = best.min(ss(x, &a) + ss(x, &b));
    }
    best
}

pub fn total_ss(x: &DataMatrix) -> f64 {
    ss(x, &(0..x.rows()).collect::<Vec<_>>())
}
