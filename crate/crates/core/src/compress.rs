//! `HWT1` raster export and a gzip compression study of thresholded
//! transform coefficients.
//!
//! A raster is the ASCII line `HWT1 <rows> <cols>\n` followed by the values
//! as row-major little-endian 32-bit floats.

use std::io::{Read, Write};

use flate2::read::GzDecoder;
use flate2::{Compression, GzBuilder};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::filtering::{hard_threshold, mse, MseMode};
use crate::haar::{forward, inverse};
use crate::hierarchy::{build_hierarchy_with, Criterion};
use crate::matrix::DataMatrix;
use crate::parallel::Parallelism;
use crate::tsv;

pub const GZIP_LEVEL: u32 = 6;
const MAGIC: &str = "HWT1";

pub fn encode_raster(x: &DataMatrix) -> Vec<u8> {
    let mut out = format!("{MAGIC} {} {}\n", x.rows(), x.cols()).into_bytes();
    out.reserve(4 * x.values().len());
    for &v in x.values() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_raster(bytes: &[u8]) -> Result<DataMatrix> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::parse(1, None, "missing raster header line"))?;
    let header = std::str::from_utf8(&bytes[..nl])
        .map_err(|_| Error::parse(1, None, "raster header is not ASCII"))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.first() != Some(&MAGIC) {
        return Err(Error::parse(1, Some(1), format!("expected {MAGIC:?}")));
    }
    if fields.len() != 3 {
        return Err(Error::parse(1, None, "expected HWT1 <rows> <cols>"));
    }
    let dim = |f: usize| {
        fields[f]
            .parse::<usize>()
            .map_err(|_| Error::parse(1, Some(f + 1), "dimension is not an integer"))
    };
    let (rows, cols) = (dim(1)?, dim(2)?);
    let body = &bytes[nl + 1..];
    if Some(body.len()) != rows.checked_mul(cols).and_then(|c| c.checked_mul(4)) {
        return Err(Error::invalid(format!(
            "raster body has {} bytes, expected {} for {rows}x{cols}",
            body.len(),
            4 * rows * cols
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    DataMatrix::new(rows, cols, values)
}

/// RFC 1952 gzip at level 6, with a zero timestamp and no file name.
pub fn gzip(bytes: &[u8]) -> Vec<u8> {
    let mut enc = GzBuilder::new().mtime(0).write(Vec::new(), Compression::new(GZIP_LEVEL));
    enc.write_all(bytes).expect("writing to memory");
    enc.finish().expect("writing to memory")
}

pub fn gunzip(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    GzDecoder::new(bytes).read_to_end(&mut out)?;
    Ok(out)
}

/// Random row and column permutations drawn from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_permutation(x: &DataMatrix, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..x.rows()).collect();
    let mut cols: Vec<usize> = (0..x.cols()).collect();
    rows.shuffle(&mut rng);
    cols.shuffle(&mut rng);
    x.permuted(&rows, &cols).expect("valid permutations")
}

/// What a study row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// The input array itself.
    Original,
    /// The input with rows and columns randomly permuted.
    Permuted,
    /// Transform coefficients with details `|d| ≤ t` zeroed.
    Transform,
    /// The input with entries `|x| ≤ t` zeroed directly.
    Direct,
}

impl Series {
    pub fn name(self) -> &'static str {
        match self {
            Series::Original => "original",
            Series::Permuted => "permuted",
            Series::Transform => "transform",
            Series::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressRow {
    pub series: Series,
    pub threshold: Option<f64>,
    /// Percentage of zeroed detail entries (transform rows) or of zero
    /// entries (all other rows).
    pub pct_zero: f64,
    /// `Σ(x̂ − x)² / Σx²`; `None` for an all-zero input.
    pub mse_relative: Option<f64>,
    pub raw_bytes: usize,
    pub gzip_bytes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressEval {
    pub criterion: Criterion,
    pub thresholds: Vec<f64>,
    pub direct_thresholds: Vec<f64>,
    /// Seed for the row/column permutation.
    pub seed: u64,
}

fn pct_zero_entries(values: &[f64]) -> f64 {
    100.0 * values.iter().filter(|&&v| v == 0.0).count() as f64 / values.len() as f64
}

fn sizes(x: &DataMatrix) -> (usize, usize) {
    let raw = encode_raster(x);
    (raw.len(), gzip(&raw).len())
}

fn relative(x: &DataMatrix, approx: &DataMatrix) -> Result<Option<f64>> {
    match mse(x, approx, MseMode::Relative) {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedDenominator(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn compress_eval(x: &DataMatrix, cfg: &CompressEval) -> Result<Vec<CompressRow>> {
    compress_eval_with(x, cfg, Parallelism::default())
}

/// Reports raster and gzip sizes for the input, a permuted copy, the
/// thresholded transform coefficients (details then root smooth, `n × m`) at
/// each threshold, and directly thresholded inputs.
pub fn compress_eval_with(
    x: &DataMatrix,
    cfg: &CompressEval,
    par: Parallelism,
) -> Result<Vec<CompressRow>> {
    if let Some(t) = cfg
        .thresholds
        .iter()
        .chain(&cfg.direct_thresholds)
        .find(|t| t.is_nan() || **t < 0.0)
    {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {t}")));
    }
    let mut rows = Vec::new();
    let zero_share = pct_zero_entries(x.values());
    for (series, m) in [
        (Series::Original, x.clone()),
        (Series::Permuted, random_permutation(x, cfg.seed)),
    ] {
        let (raw_bytes, gzip_bytes) = sizes(&m);
        rows.push(CompressRow {
            series,
            threshold: None,
            pct_zero: zero_share,
            mse_relative: relative(x, x)?,
            raw_bytes,
            gzip_bytes,
        });
    }

    if !cfg.thresholds.is_empty() {
        let tree = build_hierarchy_with(x, cfg.criterion, par)?;
        let h = forward(x, &tree)?;
        let transform: Vec<Result<CompressRow>> = par.map_range(cfg.thresholds.len(), |i| {
            let t = cfg.thresholds[i];
            let th = hard_threshold(&h, t)?;
            let approx = inverse(&th.decomposition)?;
            let (raw_bytes, gzip_bytes) = sizes(&th.decomposition.coefficient_matrix());
            Ok(CompressRow {
                series: Series::Transform,
                threshold: Some(t),
                pct_zero: th.percent_zeroed(),
                mse_relative: relative(x, &approx)?,
                raw_bytes,
                gzip_bytes,
            })
        });
        for r in transform {
            rows.push(r?);
        }
    }

    for &t in &cfg.direct_thresholds {
        let values = x
            .values()
            .iter()
            .map(|&v| if v.abs() <= t { 0.0 } else { v })
            .collect();
        let approx = DataMatrix::new(x.rows(), x.cols(), values)?;
        let (raw_bytes, gzip_bytes) = sizes(&approx);
        rows.push(CompressRow {
            series: Series::Direct,
            threshold: Some(t),
            pct_zero: pct_zero_entries(approx.values()),
            mse_relative: relative(x, &approx)?,
            raw_bytes,
            gzip_bytes,
        });
    }
    Ok(rows)
}

pub fn compress_tsv(rows: &[CompressRow]) -> String {
    let na = || "NA".to_string();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.series.name().to_string(),
                r.threshold.map_or_else(na, |t| tsv::format_sig(t, 6)),
                tsv::format_sig(r.pct_zero, 6),
                r.mse_relative.map_or_else(na, |v| tsv::format_sig(v, 6)),
                r.raw_bytes.to_string(),
                r.gzip_bytes.to_string(),
                GZIP_LEVEL.to_string(),
            ]
        })
        .collect();
    tsv::render(
        &[
            "series",
            "threshold",
            "pct_zero",
            "mse_relative",
            "raw_bytes",
            "gzip_bytes",
            "gzip_level",
        ],
        &body,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_round_trip() {
        let x = DataMatrix::from_rows(&[[0.5, -2.0, 1e10], [3.25, 0.0, -0.125]]).unwrap();
        let bytes = encode_raster(&x);
        assert!(bytes.starts_with(b"HWT1 2 3\n"));
        assert_eq!(bytes.len(), 9 + 24);
        assert_eq!(decode_raster(&bytes).unwrap().values(), x.values());
    }

    #[test]
    fn raster_errors() {
        assert!(decode_raster(b"HWT2 1 1\n\0\0\0\0").is_err());
        assert!(decode_raster(b"HWT1 1 2\n\0\0\0\0").is_err());
        assert!(decode_raster(b"HWT1 1 x\n").is_err());
    }

    #[test]
    fn gzip_round_trip_and_zero_array() {
        let x = DataMatrix::zeros(100, 40).unwrap();
        let raw = encode_raster(&x);
        let z = gzip(&raw);
        assert_eq!(&z[..2], &[0x1f, 0x8b]);
        assert!(z.len() * 50 < raw.len());
        assert_eq!(gunzip(&z).unwrap(), raw);
    }

    #[test]
    fn study_rows() {
        let x = crate::datasets::uniform_matrix(40, 6, 0.0, 1.0, 2).unwrap();
        let cfg = CompressEval {
            criterion: Criterion::Ward,
            thresholds: vec![0.0, 0.1],
            direct_thresholds: vec![0.2],
            seed: 1,
        };
        let rows = compress_eval(&x, &cfg).unwrap();
        let kinds: Vec<Series> = rows.iter().map(|r| r.series).collect();
        assert_eq!(
            kinds,
            [Series::Original, Series::Permuted, Series::Transform, Series::Transform, Series::Direct]
        );
        assert!(rows[2].mse_relative.unwrap() < 1e-20);
        assert!(rows.iter().all(|r| r.raw_bytes == encode_raster(&x).len()));
        assert_eq!(compress_tsv(&rows).lines().count(), 6);
        let seq = compress_eval_with(&x, &cfg, Parallelism::Sequential).unwrap();
        assert_eq!(seq, rows);
    }
}
