//! Ordinary least squares multiple linear regression.

use alloc::vec::Vec;

use crate::float;
use crate::matrix::Matrix;

/// Relative tolerance of the numerical rank check, against the largest
/// column norm of the intercept-augmented design matrix.
const RANK_TOLERANCE: f64 = 1e-10;

/// Fitted least-squares line ŷ = β₀ + β₁x₁ + … + β_p x_p.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub intercept: f64,
    pub slopes: Vec<f64>,
    /// Standard deviation of the training residuals, divisor n − p − 1
    /// (0 when the fit interpolates exactly).
    pub training_residual_std: f64,
}

/// Invalid input to fitting or prediction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinearError {
    #[error("{rows} rows cannot determine {coefficients} coefficients")]
    TooFewRows { rows: usize, coefficients: usize },
    #[error("feature column {column} is linearly dependent on earlier columns")]
    RankDeficient { column: usize },
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Fits OLS coefficients by Householder QR on the intercept-augmented
/// design matrix.
pub fn fit_linear(features: &Matrix, target: &[f64]) -> Result<LinearModel, LinearError> {
    let n = features.rows();
    let p = features.cols();
    let m = p + 1;
    assert_eq!(target.len(), n, "target length != row count");
    if n < m {
        return Err(LinearError::TooFewRows { rows: n, coefficients: m });
    }

    // Column-major working copy of [1 | X].
    let mut a = alloc::vec![0.0; n * m];
    for i in 0..n {
        a[i] = 1.0;
        let row = features.row(i);
        for j in 0..p {
            a[(j + 1) * n + i] = row[j];
        }
    }
    let mut qty: Vec<f64> = target.to_vec();

    let max_norm = (0..m)
        .map(|j| float::sqrt(a[j * n..(j + 1) * n].iter().map(|v| v * v).sum()))
        .fold(0.0, f64::max);

    let mut rdiag = alloc::vec![0.0; m];
    for j in 0..m {
        let norm = float::sqrt(a[j * n + j..(j + 1) * n].iter().map(|v| v * v).sum());
        if norm <= RANK_TOLERANCE * max_norm {
            return Err(LinearError::RankDeficient { column: j.saturating_sub(1) });
        }
        let alpha = if a[j * n + j] > 0.0 { -norm } else { norm };
        // Reflector v = x − α·e₁, stored in place of the eliminated column.
        a[j * n + j] -= alpha;
        rdiag[j] = alpha;
        let vtv: f64 = a[j * n + j..(j + 1) * n].iter().map(|v| v * v).sum();
        for c in j + 1..m {
            let dot: f64 = (j..n).map(|i| a[j * n + i] * a[c * n + i]).sum();
            let s = 2.0 * dot / vtv;
            for i in j..n {
                a[c * n + i] -= s * a[j * n + i];
            }
        }
        let dot: f64 = (j..n).map(|i| a[j * n + i] * qty[i]).sum();
        let s = 2.0 * dot / vtv;
        for i in j..n {
            qty[i] -= s * a[j * n + i];
        }
    }

    // Back substitution on R β = Qᵀy.
    let mut beta = alloc::vec![0.0; m];
    for j in (0..m).rev() {
        let tail: f64 = (j + 1..m).map(|c| a[c * n + j] * beta[c]).sum();
        beta[j] = (qty[j] - tail) / rdiag[j];
    }

    let ss_res: f64 = qty[m..n].iter().map(|v| v * v).sum();
    let training_residual_std = if n > m { float::sqrt(ss_res / (n - m) as f64) } else { 0.0 };

    Ok(LinearModel { intercept: beta[0], slopes: beta[1..].to_vec(), training_residual_std })
}

impl LinearModel {
    pub fn feature_count(&self) -> usize {
        self.slopes.len()
    }

    /// Prediction for a single feature row.
    pub fn predict_row(&self, row: &[f64]) -> Result<f64, LinearError> {
        if row.len() != self.slopes.len() {
            return Err(LinearError::DimensionMismatch {
                expected: self.slopes.len(),
                found: row.len(),
            });
        }
        Ok(self.intercept + self.slopes.iter().zip(row).map(|(b, x)| b * x).sum::<f64>())
    }

    /// Predictions for every row of `features`.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>, LinearError> {
        (0..features.rows()).map(|i| self.predict_row(features.row(i))).collect()
    }
}
