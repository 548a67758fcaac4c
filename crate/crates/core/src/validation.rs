//! Train/test splitting, k-fold cross-validation, whole-pipeline evaluation,
//! and permutation importance.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::float;
use crate::knn::{self, KnnError, KnnModel};
use crate::linear::{self, LinearError, LinearModel};
use crate::matrix::Matrix;
use crate::metrics::{self, MetricError, ScorePair};
use crate::standardize::Standardizer;
use crate::tree::{self, Importance, Tree, TreeError, TreeParams};

/// Error from any of the three model families or their scoring.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Knn(#[from] KnnError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Invalid input to the validation protocol.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValidationError {
    #[error("test fraction {test_fraction} leaves an empty part of {n} rows")]
    DegenerateSplit { n: usize, test_fraction: f64 },
    #[error("fold count {k} is outside 2..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: ModelError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Seeded shuffle split; test size is `round(test_fraction · n)`.
pub fn split_train_test(
    n: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), ValidationError> {
    let test_size = checked_test_size(n, test_fraction)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test: Vec<usize> = order[..test_size].to_vec();
    let mut train: Vec<usize> = order[test_size..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Order-preserving split: the last `round(test_fraction · n)` rows are the
/// test part.
pub fn split_chronological(
    n: usize,
    test_fraction: f64,
) -> Result<(Vec<usize>, Vec<usize>), ValidationError> {
    let test_size = checked_test_size(n, test_fraction)?;
    Ok(((0..n - test_size).collect(), (n - test_size..n).collect()))
}

fn checked_test_size(n: usize, test_fraction: f64) -> Result<usize, ValidationError> {
    let degenerate = ValidationError::DegenerateSplit { n, test_fraction };
    if n < 2 || !(0.0..=1.0).contains(&test_fraction) {
        return Err(degenerate);
    }
    let test_size = float::round(test_fraction * n as f64) as usize;
    if test_size == 0 || test_size >= n {
        return Err(degenerate);
    }
    Ok(test_size)
}

/// Deterministic assignment of `n` rows to `k` folds of near-equal size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Per-row fold index, in row order.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Rows of fold `f`, ascending.
    pub fn fold(&self, f: usize) -> Vec<usize> {
        assert!(f < self.k);
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == f).collect()
    }

    /// Rows outside fold `f` (the training portion), ascending.
    pub fn complement(&self, f: usize) -> Vec<usize> {
        assert!(f < self.k);
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != f).collect()
    }
}

/// Shuffles rows with the seed and deals them into k folds whose sizes
/// differ by at most one.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldAssignment, ValidationError> {
    if k < 2 || k > n {
        return Err(ValidationError::InvalidK { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = alloc::vec![0; n];
    let base = n / k;
    let remainder = n % k;
    let mut next = 0;
    for f in 0..k {
        let size = base + usize::from(f < remainder);
        for &row in &order[next..next + size] {
            assignment[row] = f;
        }
        next += size;
    }
    Ok(FoldAssignment { k, assignment })
}

/// How kNN should obtain its neighbor count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KnnStrategy {
    Fixed(usize),
    /// Inner cross-validated search over `candidates`.
    Search {
        candidates: Vec<usize>,
        folds: usize,
    },
}

impl Default for KnnStrategy {
    fn default() -> Self {
        KnnStrategy::Search { candidates: (1..=25).collect(), folds: 5 }
    }
}

/// Model family plus hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    Linear,
    Knn(KnnStrategy),
    Tree(TreeParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Linear => "linear",
            Algorithm::Knn(_) => "knn",
            Algorithm::Tree(_) => "tree",
        }
    }
}

/// A regressor to train: algorithm, hyperparameters, and the seed driving
/// any internal randomized search.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorSpec {
    pub algorithm: Algorithm,
    pub seed: u64,
}

impl RegressorSpec {
    pub fn linear(seed: u64) -> Self {
        Self { algorithm: Algorithm::Linear, seed }
    }

    /// kNN with the default cross-validated k search.
    pub fn knn(seed: u64) -> Self {
        Self { algorithm: Algorithm::Knn(KnnStrategy::default()), seed }
    }

    pub fn knn_fixed(k: usize, seed: u64) -> Self {
        Self { algorithm: Algorithm::Knn(KnnStrategy::Fixed(k)), seed }
    }

    pub fn tree(params: TreeParams, seed: u64) -> Self {
        Self { algorithm: Algorithm::Tree(params), seed }
    }

    pub fn name(&self) -> &'static str {
        self.algorithm.name()
    }
}

/// A trained model of any of the three families.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "algorithm", rename_all = "lowercase"))]
pub enum FittedRegressor {
    Linear(LinearModel),
    Knn(KnnModel),
    Tree(Tree),
}

impl FittedRegressor {
    /// Trains `spec` on the given data.
    pub fn fit(
        spec: &RegressorSpec,
        features: &Matrix,
        target: &[f64],
    ) -> Result<Self, ModelError> {
        fit_seeded(&spec.algorithm, spec.seed, features, target)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FittedRegressor::Linear(_) => "linear",
            FittedRegressor::Knn(_) => "knn",
            FittedRegressor::Tree(_) => "tree",
        }
    }

    /// The k a kNN model ended up with; None for other families.
    pub fn chosen_k(&self) -> Option<usize> {
        match self {
            FittedRegressor::Knn(m) => Some(m.k()),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&Tree> {
        match self {
            FittedRegressor::Tree(t) => Some(t),
            _ => None,
        }
    }

    pub fn feature_count(&self) -> usize {
        match self {
            FittedRegressor::Linear(m) => m.feature_count(),
            FittedRegressor::Knn(m) => m.feature_count(),
            FittedRegressor::Tree(t) => t.feature_count(),
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<f64, ModelError> {
        match self {
            FittedRegressor::Linear(m) => Ok(m.predict_row(row)?),
            FittedRegressor::Knn(m) => Ok(m.predict_row(row)?),
            FittedRegressor::Tree(t) => Ok(t.predict_row(row)?),
        }
    }

    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>, ModelError> {
        match self {
            FittedRegressor::Linear(m) => Ok(m.predict(features)?),
            FittedRegressor::Knn(m) => Ok(m.predict(features)?),
            FittedRegressor::Tree(t) => Ok(t.predict(features)?),
        }
    }
}

fn fit_seeded(
    algorithm: &Algorithm,
    seed: u64,
    features: &Matrix,
    target: &[f64],
) -> Result<FittedRegressor, ModelError> {
    match algorithm {
        Algorithm::Linear => Ok(FittedRegressor::Linear(linear::fit_linear(features, target)?)),
        Algorithm::Knn(strategy) => {
            let k = match strategy {
                KnnStrategy::Fixed(k) => *k,
                KnnStrategy::Search { candidates, folds } => {
                    knn::select_k(features, target, candidates, *folds, seed)?
                }
            };
            let standardizer = Standardizer::fit(features);
            Ok(FittedRegressor::Knn(knn::fit_knn(features, target, k, standardizer)?))
        }
        Algorithm::Tree(params) => {
            Ok(FittedRegressor::Tree(tree::fit_tree(features, target, params)?))
        }
    }
}

/// Scores cross_validate can report per fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricTag {
    Mae,
    Rmse,
    R2Ratio,
    #[default]
    R2Score,
}

impl MetricTag {
    pub fn name(&self) -> &'static str {
        match self {
            MetricTag::Mae => "mae",
            MetricTag::Rmse => "rmse",
            MetricTag::R2Ratio => "r2_ratio",
            MetricTag::R2Score => "r2_score",
        }
    }

    pub fn compute(&self, actual: &[f64], predicted: &[f64]) -> Result<f64, MetricError> {
        match self {
            MetricTag::Mae => metrics::mae(actual, predicted),
            MetricTag::Rmse => metrics::rmse(actual, predicted),
            MetricTag::R2Ratio => metrics::r2_ratio(actual, predicted),
            MetricTag::R2Score => metrics::r2_score(actual, predicted),
        }
    }
}

/// Per-fold scores of one model under k-fold cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub metric: MetricTag,
    pub fold_scores: Vec<f64>,
    /// Arithmetic mean of `fold_scores`, accumulated in fold order.
    pub average: f64,
    pub fold_mae: Vec<f64>,
    pub fold_rmse: Vec<f64>,
    /// Chosen k per fold for kNN; None entries for other families.
    pub chosen_k: Vec<Option<usize>>,
}

/// The averaging step behind `CvResult::average`: plain mean in slice order.
pub fn average_score(scores: &[f64]) -> f64 {
    assert!(!scores.is_empty(), "average of no scores");
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Per-fold seeds derived up front from the spec seed, so fold evaluation
/// order (serial or parallel) cannot influence results.
fn fold_seeds(master: u64, k: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..k).map(|_| rng.next_u64()).collect()
}

/// Trains `spec` on everything outside fold `fold`, exactly as
/// `cross_validate` does for that fold (same derived seed, same data view).
pub fn fit_fold(
    spec: &RegressorSpec,
    features: &Matrix,
    target: &[f64],
    folds: &FoldAssignment,
    fold: usize,
) -> Result<FittedRegressor, ValidationError> {
    assert!(fold < folds.k(), "fold index out of range");
    let seeds = fold_seeds(spec.seed, folds.k());
    let train_idx = folds.complement(fold);
    let train_y: Vec<f64> = train_idx.iter().map(|&i| target[i]).collect();
    fit_seeded(&spec.algorithm, seeds[fold], &features.select_rows(&train_idx), &train_y)
        .map_err(|source| ValidationError::Fold { fold, source })
}

/// Runs the k-fold protocol: fit on k−1 folds, score on the held-out fold.
///
/// Standardization and any hyperparameter search happen inside each fold's
/// training portion only.
pub fn cross_validate(
    spec: &RegressorSpec,
    features: &Matrix,
    target: &[f64],
    folds: &FoldAssignment,
    metric: MetricTag,
) -> Result<CvResult, ValidationError> {
    assert_eq!(target.len(), features.rows(), "target length != row count");
    assert_eq!(folds.n(), features.rows(), "fold assignment size mismatch");

    let run_fold = |f: usize| -> Result<(f64, f64, f64, Option<usize>), ValidationError> {
        let model = fit_fold(spec, features, target, folds, f)?;
        let val_idx = folds.fold(f);
        let actual: Vec<f64> = val_idx.iter().map(|&i| target[i]).collect();
        let predicted = model
            .predict(&features.select_rows(&val_idx))
            .map_err(|source| ValidationError::Fold { fold: f, source })?;
        let annotate =
            |source: MetricError| ValidationError::Fold { fold: f, source: source.into() };
        let score = metric.compute(&actual, &predicted).map_err(annotate)?;
        let mae = metrics::mae(&actual, &predicted).map_err(annotate)?;
        let rmse = metrics::rmse(&actual, &predicted).map_err(annotate)?;
        Ok((score, mae, rmse, model.chosen_k()))
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = {
        use rayon::prelude::*;
        (0..folds.k()).into_par_iter().map(run_fold).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = (0..folds.k()).map(run_fold).collect();

    let mut fold_scores = Vec::with_capacity(folds.k());
    let mut fold_mae = Vec::with_capacity(folds.k());
    let mut fold_rmse = Vec::with_capacity(folds.k());
    let mut chosen_k = Vec::with_capacity(folds.k());
    for outcome in outcomes {
        let (score, mae, rmse, k) = outcome?;
        fold_scores.push(score);
        fold_mae.push(mae);
        fold_rmse.push(rmse);
        chosen_k.push(k);
    }
    let average = average_score(&fold_scores);
    Ok(CvResult { metric, fold_scores, average, fold_mae, fold_rmse, chosen_k })
}

/// How `evaluate` should carve out the held-out test set.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
    /// Take the last rows as the test set instead of shuffling.
    pub chronological: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { test_fraction: 0.2, seed: 42, chronological: false }
    }
}

impl SplitConfig {
    pub fn indices(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>), ValidationError> {
        if self.chronological {
            split_chronological(n, self.test_fraction)
        } else {
            split_train_test(n, self.test_fraction, self.seed)
        }
    }
}

/// Shuffle repetitions used for permutation importance inside `evaluate`.
pub const PERMUTATION_REPEATS: usize = 5;

/// Held-out scores and diagnostics of one trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEval {
    pub name: String,
    pub scores: ScorePair,
    pub chosen_k: Option<usize>,
    pub permutation_importance: Vec<f64>,
    pub test_predictions: Vec<f64>,
    pub fitted: FittedRegressor,
}

/// Outcome of the 80/20 benchmark over a list of model specs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub models: Vec<ModelEval>,
    /// Impurity-decrease importance of the first tree spec, if any.
    pub tree_importance: Option<Importance>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

impl EvalResult {
    pub fn train_size(&self) -> usize {
        self.train_indices.len()
    }

    pub fn test_size(&self) -> usize {
        self.test_indices.len()
    }
}

/// Fits every spec on the training part and scores it on the held-out part.
pub fn evaluate(
    specs: &[RegressorSpec],
    features: &Matrix,
    target: &[f64],
    split: &SplitConfig,
) -> Result<EvalResult, ValidationError> {
    assert_eq!(target.len(), features.rows(), "target length != row count");
    let (train_indices, test_indices) = split.indices(features.rows())?;
    let train_x = features.select_rows(&train_indices);
    let train_y: Vec<f64> = train_indices.iter().map(|&i| target[i]).collect();
    let test_x = features.select_rows(&test_indices);
    let test_y: Vec<f64> = test_indices.iter().map(|&i| target[i]).collect();

    let mut models = Vec::with_capacity(specs.len());
    let mut tree_importance = None;
    for spec in specs {
        let fitted = FittedRegressor::fit(spec, &train_x, &train_y)?;
        let test_predictions = fitted.predict(&test_x).map_err(ValidationError::Model)?;
        let scores = ScorePair::compute(&test_y, &test_predictions)
            .map_err(|e| ValidationError::Model(e.into()))?;
        let permutation_importance = permutation_importance_fitted(
            &fitted,
            &test_x,
            &test_y,
            PERMUTATION_REPEATS,
            spec.seed,
        )?;
        if tree_importance.is_none() {
            tree_importance = fitted.as_tree().map(Tree::importance);
        }
        models.push(ModelEval {
            name: String::from(spec.name()),
            scores,
            chosen_k: fitted.chosen_k(),
            permutation_importance,
            test_predictions,
            fitted,
        });
    }
    Ok(EvalResult { models, tree_importance, train_indices, test_indices, seed: split.seed })
}

/// Splits, fits `spec`, and measures permutation importance on the test part.
pub fn permutation_importance(
    spec: &RegressorSpec,
    features: &Matrix,
    target: &[f64],
    split: &SplitConfig,
    repeats: usize,
    seed: u64,
) -> Result<Vec<f64>, ValidationError> {
    let (train_indices, test_indices) = split.indices(features.rows())?;
    let train_y: Vec<f64> = train_indices.iter().map(|&i| target[i]).collect();
    let test_y: Vec<f64> = test_indices.iter().map(|&i| target[i]).collect();
    let fitted = FittedRegressor::fit(spec, &features.select_rows(&train_indices), &train_y)?;
    permutation_importance_fitted(
        &fitted,
        &features.select_rows(&test_indices),
        &test_y,
        repeats,
        seed,
    )
}

/// Mean test-MAE increase per feature over seeded column shuffles, clamped
/// at 0 and normalized to sum 1 when any feature matters.
pub fn permutation_importance_fitted(
    model: &FittedRegressor,
    test_features: &Matrix,
    test_target: &[f64],
    repeats: usize,
    seed: u64,
) -> Result<Vec<f64>, ValidationError> {
    assert!(repeats >= 1, "permutation importance needs at least one repeat");
    let as_model_err = |e: MetricError| ValidationError::Model(e.into());
    let baseline_preds = model.predict(test_features).map_err(ValidationError::Model)?;
    let baseline = metrics::mae(test_target, &baseline_preds).map_err(as_model_err)?;

    let p = test_features.cols();
    let n = test_features.rows();
    let shuffle_seeds = fold_seeds(seed, p * repeats);

    let mut values = Vec::with_capacity(p);
    for feature in 0..p {
        let column = test_features.column(feature);
        let mut total_increase = 0.0;
        for repeat in 0..repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seeds[feature * repeats + repeat]);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut shuffled = test_features.clone();
            for (row, &source) in order.iter().enumerate() {
                shuffled.set(row, feature, column[source]);
            }
            let preds = model.predict(&shuffled).map_err(ValidationError::Model)?;
            total_increase += metrics::mae(test_target, &preds).map_err(as_model_err)? - baseline;
        }
        values.push((total_increase / repeats as f64).max(0.0));
    }
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        for v in &mut values {
            *v /= total;
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn split_sizes_follow_the_rounding_rule() {
        let (train, test) = split_train_test(10, 0.2, 0).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));

        let (train, test) = split_train_test(4464, 0.2, 1).unwrap();
        assert_eq!((train.len(), test.len()), (3571, 893));
    }

    #[test]
    fn split_parts_are_disjoint_and_cover_everything() {
        let (train, test) = split_train_test(101, 0.3, 7).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        assert_eq!(split_train_test(50, 0.2, 9).unwrap(), split_train_test(50, 0.2, 9).unwrap());
        assert_ne!(
            split_train_test(50, 0.2, 9).unwrap().1,
            split_train_test(50, 0.2, 10).unwrap().1
        );
    }

    #[test]
    fn degenerate_splits_are_rejected() {
        assert!(matches!(
            split_train_test(10, 0.01, 0),
            Err(ValidationError::DegenerateSplit { .. })
        ));
        assert!(matches!(
            split_train_test(10, 0.99, 0),
            Err(ValidationError::DegenerateSplit { .. })
        ));
        assert!(matches!(
            split_train_test(1, 0.5, 0),
            Err(ValidationError::DegenerateSplit { .. })
        ));
    }

    #[test]
    fn chronological_split_takes_the_tail_as_test() {
        let (train, test) = split_chronological(10, 0.2).unwrap();
        assert_eq!(train, (0..8).collect::<Vec<_>>());
        assert_eq!(test, alloc::vec![8, 9]);
    }

    #[test]
    fn ten_folds_of_ten_rows_are_singletons() {
        let folds = kfold(10, 10, 42).unwrap();
        for f in 0..10 {
            assert_eq!(folds.fold(f).len(), 1);
        }
    }

    #[test]
    fn twenty_three_rows_deal_into_three_threes_and_seven_twos() {
        let folds = kfold(23, 10, 42).unwrap();
        let sizes: Vec<usize> = (0..10).map(|f| folds.fold(f).len()).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 3).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 2).count(), 7);
    }

    #[test]
    fn folds_partition_the_rows() {
        let folds = kfold(57, 7, 3).unwrap();
        let mut seen = alloc::vec![0usize; 57];
        for f in 0..7 {
            for row in folds.fold(f) {
                seen[row] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let mut sizes: Vec<usize> = (0..7).map(|f| folds.fold(f).len()).collect();
        sizes.sort_unstable();
        assert!(sizes[6] - sizes[0] <= 1);
    }

    #[test]
    fn invalid_fold_counts_are_rejected() {
        assert!(matches!(kfold(5, 1, 0), Err(ValidationError::InvalidK { .. })));
        assert!(matches!(kfold(5, 6, 0), Err(ValidationError::InvalidK { .. })));
    }

    #[test]
    fn average_score_is_the_plain_mean() {
        assert_eq!(average_score(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(average_score(&[0.5]), 0.5);
    }

    fn linear_dataset(n: usize) -> (Matrix, Vec<f64>) {
        let rows: Vec<[f64; 2]> = (0..n).map(|i| [i as f64, (i % 3) as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 + 2.0 * r[0] - 0.5 * r[1]).collect();
        (Matrix::from_rows(&rows), y)
    }

    #[test]
    fn noiseless_linear_data_scores_one_in_every_fold() {
        let (x, y) = linear_dataset(40);
        let folds = kfold(40, 5, 11).unwrap();
        let result =
            cross_validate(&RegressorSpec::linear(11), &x, &y, &folds, MetricTag::R2Score).unwrap();
        assert_eq!(result.fold_scores.len(), 5);
        for score in &result.fold_scores {
            assert!(*score > 1.0 - 1e-9, "fold score {score}");
        }
        assert_eq!(result.average, average_score(&result.fold_scores));
        assert!(result.chosen_k.iter().all(Option::is_none));
    }

    #[test]
    fn cross_validate_records_the_chosen_k_per_fold() {
        let (x, y) = linear_dataset(30);
        let folds = kfold(30, 3, 5).unwrap();
        let spec = RegressorSpec {
            algorithm: Algorithm::Knn(KnnStrategy::Search {
                candidates: alloc::vec![1, 2, 3],
                folds: 2,
            }),
            seed: 5,
        };
        let result = cross_validate(&spec, &x, &y, &folds, MetricTag::R2Score).unwrap();
        assert!(result.chosen_k.iter().all(|k| matches!(k, Some(1..=3))));
    }

    #[test]
    fn cross_validate_is_deterministic() {
        let (x, y) = linear_dataset(60);
        let folds = kfold(60, 4, 2).unwrap();
        let spec = RegressorSpec::knn(2);
        let a = cross_validate(&spec, &x, &y, &folds, MetricTag::R2Score).unwrap();
        let b = cross_validate(&spec, &x, &y, &folds, MetricTag::R2Score).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fold_models_never_see_their_validation_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let rows: Vec<[f64; 2]> = (0..30).map(|_| [rng.random(), rng.random()]).collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<f64> = (0..30).map(|_| rng.random()).collect();
        let folds = kfold(30, 3, 1).unwrap();

        let mut garbage = y.clone();
        for i in folds.fold(1) {
            garbage[i] = 1e9;
        }
        let knn_search = RegressorSpec {
            algorithm: Algorithm::Knn(KnnStrategy::Search {
                candidates: alloc::vec![1, 2, 5],
                folds: 3,
            }),
            seed: 4,
        };
        for spec in
            [RegressorSpec::linear(4), knn_search, RegressorSpec::tree(TreeParams::default(), 4)]
        {
            let clean = fit_fold(&spec, &x, &y, &folds, 1).unwrap();
            let poisoned = fit_fold(&spec, &x, &garbage, &folds, 1).unwrap();
            assert_eq!(clean, poisoned, "{} model depends on fold-1 targets", spec.name());
        }
    }

    #[test]
    fn evaluate_solves_noiseless_linear_data_exactly() {
        let (x, y) = linear_dataset(50);
        let result =
            evaluate(&[RegressorSpec::linear(42)], &x, &y, &SplitConfig::default()).unwrap();
        assert_eq!(result.models.len(), 1);
        let eval = &result.models[0];
        assert!(eval.scores.mae < 1e-6, "mae {}", eval.scores.mae);
        assert!(eval.scores.r2_score > 1.0 - 1e-9);
        assert_eq!(result.train_size() + result.test_size(), 50);
        assert!(result.tree_importance.is_none());
    }

    #[test]
    fn evaluate_on_ten_rows_returns_one_score_pair_per_spec() {
        let (x, y) = linear_dataset(10);
        let result = evaluate(
            &[RegressorSpec::tree(TreeParams::default(), 7)],
            &x,
            &y,
            &SplitConfig::default(),
        )
        .unwrap();
        assert_eq!(result.models.len(), 1);
        assert_eq!(result.models[0].scores.n, result.test_size());
        assert!(result.tree_importance.is_some());
    }

    #[test]
    fn permutation_importance_finds_the_only_informative_feature() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rows: Vec<[f64; 3]> =
            (0..120).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<f64> = rows.iter().map(|r| 5.0 * r[0]).collect();
        let importance = permutation_importance(
            &RegressorSpec::linear(3),
            &x,
            &y,
            &SplitConfig::default(),
            5,
            3,
        )
        .unwrap();
        assert!(importance[0] > 0.9, "importance {importance:?}");
        assert!((importance.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_features_get_zero_permutation_importance() {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [i as f64, 3.0]).collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<f64> = (0..40).map(|i| if i < 20 { 0.0 } else { 10.0 }).collect();
        let importance = permutation_importance(
            &RegressorSpec::tree(TreeParams::default(), 13),
            &x,
            &y,
            &SplitConfig::default(),
            3,
            13,
        )
        .unwrap();
        assert_eq!(importance[1], 0.0);
        assert_eq!(importance[0], 1.0);
    }
}
