//! Hard-threshold filtering of Haar coefficients and reconstruction quality.

use crate::error::{Error, Result};
use crate::haar::{forward, inverse, HaarDecomposition};
use crate::hierarchy::{build_hierarchy_with, Criterion};
use crate::matrix::DataMatrix;
use crate::parallel::Parallelism;
use crate::tsv;

/// A thresholded decomposition and how many detail entries were zeroed.
#[derive(Debug, Clone)]
pub struct Thresholded {
    pub decomposition: HaarDecomposition,
    pub zeroed: usize,
    /// All `(n − 1)·m` detail entries; the final smooth is never counted.
    pub total: usize,
}

impl Thresholded {
    pub fn percent_zeroed(&self) -> f64 {
        100.0 * self.zeroed as f64 / self.total as f64
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Sets every detail entry with `|d| ≤ t` to zero. The final smooth is kept.
pub fn hard_threshold(h: &HaarDecomposition, t: f64) -> Result<Thresholded> {
    check_threshold(t)?;
    let mut zeroed = 0;
    let details: Vec<f64> = h
        .details()
        .iter()
        .map(|&d| {
            if d.abs() <= t {
                zeroed += 1;
                0.0
            } else {
                d
            }
        })
        .collect();
    let total = details.len();
    Ok(Thresholded {
        decomposition: h.with_coefficients(details, h.final_smooth().to_vec())?,
        zeroed,
        total,
    })
}

/// Mean squared entry, `1/(nm) Σ x²`.
pub fn energy(x: &DataMatrix) -> f64 {
    x.values().iter().map(|v| v * v).sum::<f64>() / x.values().len() as f64
}

/// Normalisation of the squared reconstruction error `Σ (x̂ − x)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MseMode {
    /// Divided by the number of observations `n`.
    PerObservation,
    /// Divided by the number of entries `n·m`. This is the figure reported by
    /// sweeps and by the median baseline.
    PerEntry,
    /// Divided by `Σ x²`.
    Relative,
}

pub fn mse(x: &DataMatrix, approx: &DataMatrix, mode: MseMode) -> Result<f64> {
    x.check_same_shape(approx)?;
    let sse: f64 = x
        .values()
        .iter()
        .zip(approx.values())
        .map(|(a, b)| (b - a) * (b - a))
        .sum();
    Ok(match mode {
        MseMode::PerObservation => sse / x.rows() as f64,
        MseMode::PerEntry => sse / x.values().len() as f64,
        MseMode::Relative => {
            let norm: f64 = x.values().iter().map(|v| v * v).sum();
            if norm == 0.0 {
                return Err(Error::UndefinedDenominator(
                    "relative error of an all-zero matrix".into(),
                ));
            }
            sse / norm
        }
    })
}

/// Summary of one filtering run.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothStats {
    pub threshold: f64,
    pub pct_zero: f64,
    pub mse_per_entry: f64,
    pub mse_per_observation: f64,
    /// `None` when the input is all zeros.
    pub mse_relative: Option<f64>,
    pub energy: f64,
}

impl SmoothStats {
    pub const TSV_HEADER: [&'static str; 6] = [
        "threshold",
        "pct_zero",
        "mse",
        "mse_per_observation",
        "mse_relative",
        "energy",
    ];

    pub fn tsv_row(&self) -> Vec<String> {
        vec![
            tsv::format_sig(self.threshold, 6),
            tsv::format_sig(self.pct_zero, 6),
            tsv::format_sig(self.mse_per_entry, 6),
            tsv::format_sig(self.mse_per_observation, 6),
            self.mse_relative
                .map_or_else(|| "NA".to_string(), |v| tsv::format_sig(v, 6)),
            tsv::format_sig(self.energy, 6),
        ]
    }

    pub fn to_tsv(&self) -> String {
        tsv::render(&Self::TSV_HEADER, &[self.tsv_row()])
    }
}

/// Thresholds an existing decomposition of `x` and reconstructs.
pub fn filter_decomposition(
    x: &DataMatrix,
    h: &HaarDecomposition,
    t: f64,
) -> Result<(DataMatrix, SmoothStats)> {
    let th = hard_threshold(h, t)?;
    let approx = inverse(&th.decomposition)?;
    let stats = SmoothStats {
        threshold: t,
        pct_zero: th.percent_zeroed(),
        mse_per_entry: mse(x, &approx, MseMode::PerEntry)?,
        mse_per_observation: mse(x, &approx, MseMode::PerObservation)?,
        mse_relative: mse(x, &approx, MseMode::Relative).ok(),
        energy: energy(x),
    };
    Ok((approx, stats))
}

/// Cluster, transform, hard-threshold at `t`, and invert.
pub fn smooth_pipeline(
    x: &DataMatrix,
    criterion: Criterion,
    t: f64,
) -> Result<(DataMatrix, SmoothStats)> {
    check_threshold(t)?;
    let tree = build_hierarchy_with(x, criterion, Parallelism::default())?;
    let h = forward(x, &tree)?;
    filter_decomposition(x, &h, t)
}

/// One line of a threshold sweep. `mse` is the per-entry mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub threshold: f64,
    pub pct_zero: f64,
    pub mse: f64,
}

pub fn threshold_sweep(
    x: &DataMatrix,
    criterion: Criterion,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>> {
    threshold_sweep_with(x, criterion, thresholds, Parallelism::default())
}

/// Builds the tree and transform once, then filters at every threshold.
pub fn threshold_sweep_with(
    x: &DataMatrix,
    criterion: Criterion,
    thresholds: &[f64],
    par: Parallelism,
) -> Result<Vec<SweepRow>> {
    for &t in thresholds {
        check_threshold(t)?;
    }
    if thresholds.is_empty() {
        return Ok(Vec::new());
    }
    let tree = build_hierarchy_with(x, criterion, par)?;
    let h = forward(x, &tree)?;
    par.map_range(thresholds.len(), |i| {
        filter_decomposition(x, &h, thresholds[i]).map(|(_, s)| SweepRow {
            threshold: s.threshold,
            pct_zero: s.pct_zero,
            mse: s.mse_per_entry,
        })
    })
    .into_iter()
    .collect()
}

/// `threshold  pct_zero  mse` table with 6 significant digits.
pub fn sweep_tsv(rows: &[SweepRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                tsv::format_sig(r.threshold, 6),
                tsv::format_sig(r.pct_zero, 6),
                tsv::format_sig(r.mse, 6),
            ]
        })
        .collect();
    tsv::render(&["threshold", "pct_zero", "mse"], &body)
}

/// Which entries the median baseline zeroes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MedianCut {
    /// Entries strictly below the median.
    Below,
    /// Entries at or below the median.
    #[default]
    AtOrBelow,
}

#[derive(Debug, Clone)]
pub struct MedianBaseline {
    pub filtered: DataMatrix,
    pub median: f64,
    pub zeroed: usize,
    pub mse_per_entry: f64,
    pub mse_per_observation: f64,
}

/// Median of all entries; an even count takes the midpoint of the two
/// central order statistics.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Direct filtering without a hierarchy: zero entries relative to the
/// global median.
pub fn median_baseline(x: &DataMatrix, cut: MedianCut) -> MedianBaseline {
    let med = median(x.values());
    let mut zeroed = 0;
    let values: Vec<f64> = x
        .values()
        .iter()
        .map(|&v| {
            let drop = match cut {
                MedianCut::Below => v < med,
                MedianCut::AtOrBelow => v <= med,
            };
            if drop {
                zeroed += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let filtered = DataMatrix::new(x.rows(), x.cols(), values)
        .expect("same shape as a valid matrix")
        .labels_from(x);
    MedianBaseline {
        mse_per_entry: mse(x, &filtered, MseMode::PerEntry).expect("same shape"),
        mse_per_observation: mse(x, &filtered, MseMode::PerObservation).expect("same shape"),
        filtered,
        median: med,
        zeroed,
    }
}
