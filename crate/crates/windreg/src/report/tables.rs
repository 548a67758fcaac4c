//! CSV table emitters mirroring the benchmark's four result tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use windreg_core::stats::ColumnStats;
use windreg_core::validation::{CvResult, EvalResult};

use super::{ReportBundle, ReportError};
use crate::dataset::{COLUMN_NAMES, FEATURE_COUNT};

/// Tolerance of the importance normalization check.
pub const IMPORTANCE_TOLERANCE: f64 = 1e-4;

fn f4(value: f64) -> String {
    format!("{value:.4}")
}

fn f2(value: f64) -> String {
    format!("{value:.2}")
}

/// Fails unless the values form a distribution: non-negative and summing to
/// 1 within [`IMPORTANCE_TOLERANCE`].
pub fn validate_importance(values: &[f64]) -> Result<(), ReportError> {
    if values.iter().any(|v| *v < 0.0) {
        return Err(ReportError::IncompleteResults(String::from(
            "importance values must be non-negative",
        )));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > IMPORTANCE_TOLERANCE {
        return Err(ReportError::UnnormalizedImportance { sum });
    }
    Ok(())
}

/// One row per dataset column: mean, std, min, max at four decimals.
pub fn render_stats_csv(stats: &[ColumnStats]) -> Result<String, ReportError> {
    if stats.len() != COLUMN_NAMES.len() {
        return Err(ReportError::IncompleteResults(format!(
            "expected {} column statistics, got {}",
            COLUMN_NAMES.len(),
            stats.len()
        )));
    }
    let mut out = String::from("column,mean,std,min,max\n");
    for (name, s) in COLUMN_NAMES.iter().zip(stats) {
        let _ = writeln!(out, "{},{},{},{},{}", name, f4(s.mean), f4(s.std), f4(s.min), f4(s.max));
    }
    Ok(out)
}

/// One row per fold plus an `average` row; one score column per model.
pub fn render_cv_csv(results: &[(String, CvResult)]) -> Result<String, ReportError> {
    let folds = match results.first() {
        Some((_, first)) => first.fold_scores.len(),
        None => {
            return Err(ReportError::IncompleteResults(String::from("no cross-validation results")))
        }
    };
    if results.iter().any(|(_, r)| r.fold_scores.len() != folds) {
        return Err(ReportError::IncompleteResults(String::from(
            "models were scored on different fold counts",
        )));
    }
    let mut out = String::from("fold");
    for (name, _) in results {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for fold in 0..folds {
        let _ = write!(out, "{fold}");
        for (_, result) in results {
            let _ = write!(out, ",{}", f4(result.fold_scores[fold]));
        }
        out.push('\n');
    }
    let _ = write!(out, "average");
    for (_, result) in results {
        let _ = write!(out, ",{}", f4(result.average));
    }
    out.push('\n');
    Ok(out)
}

/// One row per model: MAE and RMSE in kW at two decimals, both coefficient
/// of determination variants at four.
pub fn render_errors_csv(eval: &EvalResult) -> Result<String, ReportError> {
    if eval.models.is_empty() {
        return Err(ReportError::IncompleteResults(String::from("no evaluated models")));
    }
    let mut out = String::from("model,mae_kw,rmse_kw,r2_ratio,r2_score\n");
    for model in &eval.models {
        let s = &model.scores;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            model.name,
            f2(s.mae),
            f2(s.rmse),
            f4(s.r2_ratio),
            f4(s.r2_score)
        );
    }
    Ok(out)
}

/// One row per feature: the tree's impurity importance (when a tree was
/// evaluated) and each model's permutation importance, all validated to sum
/// to 1 where applicable.
pub fn render_importance_csv(eval: &EvalResult) -> Result<String, ReportError> {
    if eval.models.is_empty() {
        return Err(ReportError::IncompleteResults(String::from("no evaluated models")));
    }
    let impurity = eval.tree_importance.as_ref().map(|imp| &imp.values);
    if let Some(values) = impurity {
        if values.len() != FEATURE_COUNT {
            return Err(ReportError::IncompleteResults(String::from(
                "tree importance has the wrong feature count",
            )));
        }
        validate_importance(values)?;
    }
    for model in &eval.models {
        if model.permutation_importance.len() != FEATURE_COUNT {
            return Err(ReportError::IncompleteResults(format!(
                "permutation importance of `{}` has the wrong feature count",
                model.name
            )));
        }
        if model.permutation_importance.iter().sum::<f64>() > 0.0 {
            validate_importance(&model.permutation_importance)?;
        }
    }

    let mut out = String::from("feature");
    if impurity.is_some() {
        out.push_str(",impurity_importance");
    }
    for model in &eval.models {
        let _ = write!(out, ",permutation_{}", model.name);
    }
    out.push('\n');
    for (i, name) in COLUMN_NAMES.iter().take(FEATURE_COUNT).enumerate() {
        let _ = write!(out, "{name}");
        if let Some(values) = impurity {
            let _ = write!(out, ",{}", f4(values[i]));
        }
        for model in &eval.models {
            let _ = write!(out, ",{}", f4(model.permutation_importance[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Renders and writes all four tables into `dir`, returning the paths.
pub fn emit_tables(
    dir: &Path,
    stats: &[ColumnStats],
    cv: &[(String, CvResult)],
    eval: &EvalResult,
) -> Result<Vec<PathBuf>, ReportError> {
    let mut bundle = ReportBundle::new(dir);
    bundle.add_table("stats.csv", render_stats_csv(stats)?);
    bundle.add_table("cv.csv", render_cv_csv(cv)?);
    bundle.add_table("errors.csv", render_errors_csv(eval)?);
    bundle.add_table("importance.csv", render_importance_csv(eval)?);
    bundle.write()
}
