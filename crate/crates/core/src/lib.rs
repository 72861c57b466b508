//! Hierarchical Haar wavelet transform of a dendrogram.
//!
//! A data matrix is clustered agglomeratively into a ranked binary tree. Each
//! internal node then gets a smooth (the unweighted mean of its children's
//! smooths) and a detail (half their difference). The details plus the root
//! smooth are an exactly invertible representation of the data, which makes
//! them a natural place to filter, compress, or prune the tree.
//!
//! Module map:
//!
//! - [`hierarchy`]: agglomerative clustering (Ward, median, weighted average)
//!   and the [`Dendrogram`] type with its text format.
//! - [`haar`]: forward/inverse transform and the characteristic matrix form.
//! - [`filtering`]: hard thresholding, error metrics, smoothing and sweeps.
//! - [`condense`]: collapsing nodes by detail norm, partitions, k-means benchmark.
//! - [`ca`]: correspondence analysis preprocessing with doubling.
//! - [`datasets`]: iris, uniform, Gaussian-structure and demo data.
//! - [`compress`]: `HWT1` raster export and gzip compression study.

pub mod ca;
pub mod compress;
pub mod condense;
pub mod datasets;
mod error;
pub mod filtering;
pub mod haar;
pub mod hierarchy;
mod matrix;
mod parallel;
pub mod tsv;

pub use error::{Error, Result};
pub use haar::{HaarDecomposition, Orientation};
pub use hierarchy::{Criterion, Dendrogram, MergeStep, Node};
pub use matrix::DataMatrix;
pub use parallel::Parallelism;
