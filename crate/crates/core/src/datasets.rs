//! Built-in and generated datasets.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.3), so outputs are stable across platforms and rebuilds.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

mod iris_data;

/// Ratio of full width at half maximum to standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.35482;

/// Fisher's iris measurements, 150 × 4, in the usual order.
pub fn iris() -> DataMatrix {
    DataMatrix::from_rows(&iris_data::IRIS)
        .expect("static data")
        .with_col_ids(
            ["sepal_length", "sepal_width", "petal_length", "petal_width"]
                .map(String::from)
                .to_vec(),
        )
        .expect("four columns")
}

/// `n × m` i.i.d. uniform entries on `[lo, hi)`.
pub fn uniform_matrix(n: usize, m: usize, lo: f64, hi: f64, seed: u64) -> Result<DataMatrix> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!("invalid range [{lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * m).map(|_| rng.gen_range(lo..hi)).collect();
    DataMatrix::new(n, m, values)
}

/// How each Gaussian component is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// The component's values sum to `amount` over the grid.
    TotalSum,
    /// The component's peak value is `amount`.
    Peak,
}

/// One isotropic 2-D Gaussian on the grid. `center` is a zero-based
/// `(row, col)` position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: (usize, usize),
    pub fwhm: f64,
    pub amount: f64,
}

/// The five-component configuration on a 1200 × 400 grid.
pub const REFERENCE_SHAPE: (usize, usize) = (1200, 400);
pub const REFERENCE_COMPONENTS: [GaussianSpec; 5] = [
    GaussianSpec { center: (300, 100), fwhm: 20.0, amount: 10.0 },
    GaussianSpec { center: (800, 300), fwhm: 50.0, amount: 10.0 },
    GaussianSpec { center: (1000, 200), fwhm: 10.0, amount: 10.0 },
    GaussianSpec { center: (500, 150), fwhm: 100.0, amount: 10.0 },
    GaussianSpec { center: (900, 150), fwhm: 125.0, amount: 10.0 },
];

/// Sum of Gaussian components with `σ = fwhm / 2.35482`.
pub fn gaussian_structure(
    rows: usize,
    cols: usize,
    components: &[GaussianSpec],
    normalization: Normalization,
) -> Result<DataMatrix> {
    let mut values = vec![0.0; rows * cols];
    for (idx, g) in components.iter().enumerate() {
        if g.center.0 >= rows || g.center.1 >= cols {
            return Err(Error::invalid(format!(
                "component {} centre {:?} outside the {rows}x{cols} grid",
                idx + 1,
                g.center
            )));
        }
        if !(g.fwhm.is_finite() && g.fwhm > 0.0) || !(g.amount.is_finite() && g.amount >= 0.0) {
            return Err(Error::invalid(format!(
                "component {} needs a positive width and a nonnegative amount",
                idx + 1
            )));
        }
        let sigma = g.fwhm / FWHM_PER_SIGMA;
        let profile = |len: usize, c: usize| -> Vec<f64> {
            (0..len)
                .map(|i| {
                    let d = i as f64 - c as f64;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        };
        let gr = profile(rows, g.center.0);
        let gc = profile(cols, g.center.1);
        let scale = match normalization {
            Normalization::Peak => g.amount,
            Normalization::TotalSum => {
                g.amount / (gr.iter().sum::<f64>() * gc.iter().sum::<f64>())
            }
        };
        for (i, &a) in gr.iter().enumerate() {
            let row = &mut values[i * cols..(i + 1) * cols];
            for (v, &b) in row.iter_mut().zip(&gc) {
                *v += scale * a * b;
            }
        }
    }
    DataMatrix::new(rows, cols, values)
}

/// The reference configuration with peak-normalised components of height 10.
pub fn gaussian_reference() -> DataMatrix {
    gaussian_structure(
        REFERENCE_SHAPE.0,
        REFERENCE_SHAPE.1,
        &REFERENCE_COMPONENTS,
        Normalization::Peak,
    )
    .expect("static configuration")
}

/// `X + U[0, max(X) / divisor)` entrywise.
pub fn add_uniform_noise(x: &DataMatrix, divisor: f64, seed: u64) -> Result<DataMatrix> {
    if divisor.is_nan() || divisor <= 0.0 {
        return Err(Error::invalid(format!("noise divisor must be positive, got {divisor}")));
    }
    let max = x.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let amplitude = max / divisor;
    if amplitude.is_nan() || amplitude <= 0.0 || amplitude.is_infinite() {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = x
        .values()
        .iter()
        .map(|v| v + rng.gen_range(0.0..amplitude))
        .collect();
    Ok(DataMatrix::new(x.rows(), x.cols(), values)?.labels_from(x))
}

/// Eight scalar observations used to contrast with the dyadic Haar transform.
pub fn scalar_demo() -> DataMatrix {
    DataMatrix::from_rows(&[[64.0], [48.0], [16.0], [32.0], [56.0], [56.0], [48.0], [24.0]])
        .expect("static data")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iris_rows() {
        let x = iris();
        assert_eq!(x.shape(), (150, 4));
        assert_eq!(x.row(0), &[5.1, 3.5, 1.4, 0.2]);
        assert_eq!(x.row(7), &[5.0, 3.4, 1.5, 0.2]);
        assert_eq!(x.row(149), &[5.9, 3.0, 5.1, 1.8]);
    }

    #[test]
    fn uniform_is_seeded_and_in_range() {
        let a = uniform_matrix(30, 4, 0.0, 7.9, 3).unwrap();
        assert_eq!(a, uniform_matrix(30, 4, 0.0, 7.9, 3).unwrap());
        assert_ne!(a, uniform_matrix(30, 4, 0.0, 7.9, 4).unwrap());
        assert!(a.values().iter().all(|&v| (0.0..7.9).contains(&v)));
        assert!(uniform_matrix(2, 2, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn single_gaussian_sum_and_half_width() {
        let g = GaussianSpec { center: (40, 30), fwhm: 8.0, amount: 10.0 };
        let x = gaussian_structure(80, 60, &[g], Normalization::TotalSum).unwrap();
        assert!((x.values().iter().sum::<f64>() - 10.0).abs() < 1e-6);
        let half = GaussianSpec { center: (0, 0), fwhm: 8.0, amount: 1.0 };
        let y = gaussian_structure(10, 1, &[half], Normalization::Peak).unwrap();
        assert_eq!(y.get(0, 0), 1.0);
        assert!((y.get(4, 0) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn out_of_range_centre_rejected() {
        let g = GaussianSpec { center: (10, 0), fwhm: 1.0, amount: 1.0 };
        assert!(gaussian_structure(10, 10, &[g], Normalization::Peak).is_err());
    }

    #[test]
    fn noise_bounds() {
        let x = gaussian_structure(50, 20, &REFERENCE_COMPONENTS[..1].iter().map(|g| GaussianSpec { center: (25, 10), ..*g }).collect::<Vec<_>>(), Normalization::Peak).unwrap();
        let y = add_uniform_noise(&x, 10.0, 9).unwrap();
        let bound = x.values().iter().copied().fold(0.0, f64::max) / 10.0;
        assert!(x.values().iter().zip(y.values()).all(|(a, b)| b - a >= 0.0 && b - a <= bound));
        assert_eq!(add_uniform_noise(&x, f64::INFINITY, 9).unwrap(), x);
        assert!(add_uniform_noise(&x, 0.0, 9).is_err());
    }

    #[test]
    fn scalar_demo_values() {
        assert_eq!(scalar_demo().values(), &[64.0, 48.0, 16.0, 32.0, 56.0, 56.0, 48.0, 24.0]);
    }
}
