//! Per-column summary statistics and correlation.

use alloc::vec::Vec;

use crate::float;
use crate::matrix::Matrix;

/// Summary statistics of one data column.
///
/// `std` is the sample standard deviation (divisor n − 1) and is reported as
/// 0 for a single-value column; callers can detect that case through `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Arithmetic mean. Panics on empty input.
pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of empty slice");
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (divisor n − 1); 0 for n = 1.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        assert!(!values.is_empty(), "std of empty slice");
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    float::sqrt(ss / (values.len() - 1) as f64)
}

/// Summary statistics of `values`. Panics on empty input.
pub fn column_stats(values: &[f64]) -> ColumnStats {
    assert!(!values.is_empty(), "stats of empty slice");
    let mut min = values[0];
    let mut max = values[0];
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    ColumnStats { mean: mean(values), std: sample_std(values), min, max, n: values.len() }
}

/// Statistics for every column of `m`, in column order.
pub fn matrix_column_stats(m: &Matrix) -> Vec<ColumnStats> {
    (0..m.cols()).map(|c| column_stats(&m.column(c))).collect()
}

/// Pearson correlation coefficient; 0 when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "pearson inputs differ in length");
    assert!(x.len() >= 2, "pearson needs at least 2 points");
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / float::sqrt(sxx * syy)
}
