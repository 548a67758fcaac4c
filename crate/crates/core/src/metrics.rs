//! Error and goodness-of-fit measures for regression predictions.

use crate::float;

/// Invalid input to a metric computation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("actual and predicted lengths differ: {actual} vs {predicted}")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("metric of empty input")]
    EmptyInput,
    #[error("actual values are constant, R\u{b2} denominator is zero")]
    ConstantActual,
}

/// All four scores for one (actual, predicted) pair.
///
/// `r2_ratio` is the variance-ratio form Σ(ŷ−ȳ)²/Σ(y−ȳ)² and can exceed 1
/// for non-least-squares predictors; `r2_score` is the conventional
/// 1 − SSres/SStot and is the value used to rank models.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePair {
    pub mae: f64,
    pub rmse: f64,
    pub r2_ratio: f64,
    pub r2_score: f64,
    pub n: usize,
}

impl ScorePair {
    /// Computes every metric at once.
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self, MetricError> {
        Ok(Self {
            mae: mae(actual, predicted)?,
            rmse: rmse(actual, predicted)?,
            r2_ratio: r2_ratio(actual, predicted)?,
            r2_score: r2_score(actual, predicted)?,
            n: actual.len(),
        })
    }
}

fn check_lengths(actual: &[f64], predicted: &[f64]) -> Result<(), MetricError> {
    if actual.len() != predicted.len() {
        return Err(MetricError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(())
}

/// Mean absolute error: (1/n) Σ |y_j − ŷ_j|.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check_lengths(actual, predicted)?;
    let total: f64 = actual.iter().zip(predicted).map(|(y, p)| float::abs(y - p)).sum();
    Ok(total / actual.len() as f64)
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    check_lengths(actual, predicted)?;
    let total: f64 = actual.iter().zip(predicted).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(float::sqrt(total / actual.len() as f64))
}

/// R² in ratio form: Σ(ŷ_j − ȳ)² / Σ(y_j − ȳ)² with ȳ the mean of `actual`.
pub fn r2_ratio(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    let (ss_pred, _, ss_tot) = r2_sums(actual, predicted)?;
    Ok(ss_pred / ss_tot)
}

/// Conventional R²: 1 − Σ(y_j − ŷ_j)² / Σ(y_j − ȳ)².
pub fn r2_score(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
    let (_, ss_res, ss_tot) = r2_sums(actual, predicted)?;
    Ok(1.0 - ss_res / ss_tot)
}

fn r2_sums(actual: &[f64], predicted: &[f64]) -> Result<(f64, f64, f64), MetricError> {
    check_lengths(actual, predicted)?;
    let y_bar = crate::stats::mean(actual);
    let mut ss_pred = 0.0;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&y, &p) in actual.iter().zip(predicted) {
        ss_pred += (p - y_bar) * (p - y_bar);
        ss_res += (y - p) * (y - p);
        ss_tot += (y - y_bar) * (y - y_bar);
    }
    if ss_tot == 0.0 {
        return Err(MetricError::ConstantActual);
    }
    Ok((ss_pred, ss_res, ss_tot))
}
