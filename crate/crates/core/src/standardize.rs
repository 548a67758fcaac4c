//! Z-score feature standardization.

use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::stats;

/// Per-feature centering and scaling parameters.
///
/// Scales are sample standard deviations of the fitted columns, with zero
/// replaced by 1 so constant columns pass through unchanged (and contribute
/// nothing to distances).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    centers: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    /// Learns centers (column means) and scales (column sample stds) from
    /// `features`. Panics on an empty matrix.
    pub fn fit(features: &Matrix) -> Self {
        assert!(features.rows() >= 1, "standardizer needs at least one row");
        let mut centers = Vec::with_capacity(features.cols());
        let mut scales = Vec::with_capacity(features.cols());
        for c in 0..features.cols() {
            let column = features.column(c);
            centers.push(stats::mean(&column));
            let std = stats::sample_std(&column);
            scales.push(if std == 0.0 { 1.0 } else { std });
        }
        Self { centers, scales }
    }

    /// No-op standardizer (centers 0, scales 1) for `p` features.
    pub fn identity(p: usize) -> Self {
        Self { centers: alloc::vec![0.0; p], scales: alloc::vec![1.0; p] }
    }

    pub fn feature_count(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Standardizes one row. Panics on dimension mismatch.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        assert_eq!(row.len(), self.centers.len(), "row length != feature count");
        row.iter()
            .zip(self.centers.iter().zip(&self.scales))
            .map(|(v, (c, s))| (v - c) / s)
            .collect()
    }

    /// Standardizes every row of `m`.
    pub fn transform(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.cols(), self.centers.len(), "matrix width != feature count");
        let mut out = m.clone();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, c, (m.get(r, c) - self.centers[c]) / self.scales[c]);
            }
        }
        out
    }

    /// Inverse of [`transform`](Self::transform).
    pub fn inverse_transform(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.cols(), self.centers.len(), "matrix width != feature count");
        let mut out = m.clone();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, c, m.get(r, c) * self.scales[c] + self.centers[c]);
            }
        }
        out
    }
}
