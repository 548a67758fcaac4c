//! k-nearest-neighbor regression with inverse-distance weighting.

use alloc::vec::Vec;

use crate::float;
use crate::matrix::Matrix;
use crate::standardize::Standardizer;
use crate::validation;

/// Lazy kNN regressor: the standardized training set plus a neighbor count.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnnModel {
    features: Matrix,
    targets: Vec<f64>,
    k: usize,
    standardizer: Standardizer,
}

/// One entry of a neighbor ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Invalid input to fitting, prediction, or the k search.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnnError {
    #[error("k = {k} is outside 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("candidate k = {k} exceeds the smallest training fold ({max} rows)")]
    InvalidCandidate { k: usize, max: usize },
    #[error("cannot run {folds}-fold search on {rows} rows")]
    TooFewRows { rows: usize, folds: usize },
}

/// Stores the standardized training set; kNN defers all work to prediction.
pub fn fit_knn(
    features: &Matrix,
    target: &[f64],
    k: usize,
    standardizer: Standardizer,
) -> Result<KnnModel, KnnError> {
    assert_eq!(target.len(), features.rows(), "target length != row count");
    assert_eq!(standardizer.feature_count(), features.cols(), "standardizer width mismatch");
    if k < 1 || k > features.rows() {
        return Err(KnnError::InvalidK { k, n: features.rows() });
    }
    Ok(KnnModel {
        features: standardizer.transform(features),
        targets: target.to_vec(),
        k,
        standardizer,
    })
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn feature_count(&self) -> usize {
        self.features.cols()
    }

    pub fn training_len(&self) -> usize {
        self.features.rows()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Stored training features, already standardized.
    pub fn training_features(&self) -> &Matrix {
        &self.features
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    /// All training points ranked by distance to `query`, ties broken by
    /// ascending training index.
    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<Neighbor>, KnnError> {
        if query.len() != self.features.cols() {
            return Err(KnnError::DimensionMismatch {
                expected: self.features.cols(),
                found: query.len(),
            });
        }
        let z = self.standardizer.transform_row(query);
        let mut ranked: Vec<Neighbor> = self
            .features
            .iter_rows()
            .enumerate()
            .map(|(index, row)| Neighbor { index, distance: euclidean(row, &z) })
            .collect();
        ranked
            .sort_unstable_by(|a, b| a.distance.total_cmp(&b.distance).then(a.index.cmp(&b.index)));
        Ok(ranked)
    }

    /// Inverse-distance weighted prediction over the k nearest neighbors.
    pub fn predict_row(&self, query: &[f64]) -> Result<f64, KnnError> {
        let ranked = self.neighbors(query)?;
        let distances: Vec<f64> = ranked.iter().map(|nb| nb.distance).collect();
        let targets: Vec<f64> = ranked.iter().map(|nb| self.targets[nb.index]).collect();
        Ok(weighted_prediction(&distances, &targets, self.k))
    }

    /// Predictions for every row of `features`.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>, KnnError> {
        (0..features.rows()).map(|i| self.predict_row(features.row(i))).collect()
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    float::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Prediction from a distance-sorted neighbor list.
///
/// Any zero-distance neighbors short-circuit the weighting: the prediction is
/// the plain mean over the whole coincident group, which keeps the result
/// independent of how ties were ordered.
fn weighted_prediction(sorted_distances: &[f64], sorted_targets: &[f64], k: usize) -> f64 {
    let zeros = sorted_distances.iter().take_while(|d| **d == 0.0).count();
    if zeros > 0 {
        return sorted_targets[..zeros].iter().sum::<f64>() / zeros as f64;
    }
    let mut weight_sum = 0.0;
    let mut value_sum = 0.0;
    for (d, y) in sorted_distances.iter().zip(sorted_targets).take(k) {
        weight_sum += 1.0 / d;
        value_sum += y / d;
    }
    value_sum / weight_sum
}

/// Picks the candidate k with the smallest mean per-fold RMSE, searching by
/// cross-validation inside the training data; ties go to the smaller k.
pub fn select_k(
    features: &Matrix,
    target: &[f64],
    k_candidates: &[usize],
    folds: usize,
    seed: u64,
) -> Result<usize, KnnError> {
    assert_eq!(target.len(), features.rows(), "target length != row count");
    assert!(!k_candidates.is_empty(), "empty candidate set");
    assert!(folds >= 2, "k search needs at least 2 folds");
    let n = features.rows();
    let assignment =
        validation::kfold(n, folds, seed).map_err(|_| KnnError::TooFewRows { rows: n, folds })?;

    let smallest_train = n - (0..folds).map(|f| assignment.fold(f).len()).max().unwrap_or(0);
    let mut candidates: Vec<usize> = k_candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    for &k in &candidates {
        if k < 1 || k > smallest_train {
            return Err(KnnError::InvalidCandidate { k, max: smallest_train });
        }
    }

    // One distance sort per validation point serves every candidate k via
    // running weight/value sums over the sorted list.
    let mut mean_rmse = alloc::vec![0.0; candidates.len()];
    for f in 0..folds {
        let train_idx = assignment.complement(f);
        let val_idx = assignment.fold(f);
        let standardizer = Standardizer::fit(&features.select_rows(&train_idx));
        let train = standardizer.transform(&features.select_rows(&train_idx));
        let train_y: Vec<f64> = train_idx.iter().map(|&i| target[i]).collect();

        let mut sq_err = alloc::vec![0.0; candidates.len()];
        let mut ranked: Vec<(f64, usize)> = Vec::with_capacity(train.rows());
        for &v in &val_idx {
            let z = standardizer.transform_row(features.row(v));
            ranked.clear();
            ranked.extend(train.iter_rows().enumerate().map(|(i, row)| (euclidean(row, &z), i)));
            ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

            let zeros = ranked.iter().take_while(|(d, _)| *d == 0.0).count();
            let zero_mean = if zeros > 0 {
                ranked[..zeros].iter().map(|&(_, i)| train_y[i]).sum::<f64>() / zeros as f64
            } else {
                0.0
            };
            let mut weight_sum = 0.0;
            let mut value_sum = 0.0;
            let mut next = 0;
            for (slot, &k) in candidates.iter().enumerate() {
                while next < k {
                    let (d, i) = ranked[next];
                    weight_sum += 1.0 / d;
                    value_sum += train_y[i] / d;
                    next += 1;
                }
                let pred = if zeros > 0 { zero_mean } else { value_sum / weight_sum };
                let err = pred - target[v];
                sq_err[slot] += err * err;
            }
        }
        for (slot, total) in sq_err.iter().enumerate() {
            mean_rmse[slot] += float::sqrt(total / val_idx.len() as f64) / folds as f64;
        }
    }

    let mut best = candidates[0];
    let mut best_rmse = mean_rmse[0];
    for (slot, &k) in candidates.iter().enumerate().skip(1) {
        if mean_rmse[slot] < best_rmse {
            best_rmse = mean_rmse[slot];
            best = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_feature(values: &[f64]) -> Matrix {
        let rows: Vec<[f64; 1]> = values.iter().map(|&v| [v]).collect();
        Matrix::from_rows(&rows)
    }

    fn step_model(k: usize) -> KnnModel {
        let x = one_feature(&[0.0, 1.0, 2.0]);
        fit_knn(&x, &[0.0, 10.0, 20.0], k, Standardizer::identity(1)).unwrap()
    }

    #[test]
    fn k_equal_to_n_is_valid_and_k_beyond_n_is_not() {
        let x = one_feature(&[0.0, 1.0, 2.0]);
        assert!(fit_knn(&x, &[0.0; 3], 3, Standardizer::identity(1)).is_ok());
        assert_eq!(
            fit_knn(&x, &[0.0; 3], 4, Standardizer::identity(1)).unwrap_err(),
            KnnError::InvalidK { k: 4, n: 3 }
        );
        assert_eq!(
            fit_knn(&x, &[0.0; 3], 0, Standardizer::identity(1)).unwrap_err(),
            KnnError::InvalidK { k: 0, n: 3 }
        );
    }

    #[test]
    fn k1_model_reproduces_its_training_points() {
        let x = one_feature(&[1.0, 4.0, 9.0]);
        let model = fit_knn(&x, &[10.0, 40.0, 90.0], 1, Standardizer::fit(&x)).unwrap();
        for (i, want) in [10.0, 40.0, 90.0].iter().enumerate() {
            assert_eq!(model.predict_row(x.row(i)).unwrap(), *want);
        }
    }

    #[test]
    fn neighbors_rank_by_distance() {
        let model = step_model(1);
        let ranked = model.neighbors(&[0.9]).unwrap();
        let order: Vec<usize> = ranked.iter().map(|nb| nb.index).collect();
        assert_eq!(order, alloc::vec![1, 0, 2]);
        for (nb, want) in ranked.iter().zip([0.1, 0.9, 1.1]) {
            assert!((nb.distance - want).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbors_at_a_training_point_start_with_distance_zero() {
        let model = step_model(1);
        let first = &model.neighbors(&[2.0]).unwrap()[0];
        assert_eq!((first.index, first.distance), (2, 0.0));
    }

    #[test]
    fn equidistant_neighbors_order_by_index() {
        let x = one_feature(&[0.0, 2.0]);
        let model = fit_knn(&x, &[1.0, 2.0], 1, Standardizer::identity(1)).unwrap();
        let ranked = model.neighbors(&[1.0]).unwrap();
        assert_eq!(ranked[0].index, 0);
        assert_eq!(ranked[1].index, 1);
        assert_eq!(ranked[0].distance, ranked[1].distance);
    }

    #[test]
    fn zero_distance_shortcuts_the_weighting() {
        assert_eq!(step_model(2).predict_row(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn equal_distances_give_equal_weights() {
        let got = step_model(2).predict_row(&[0.5]).unwrap();
        assert!((got - 5.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn inverse_distance_weighting_matches_hand_formula() {
        let got = step_model(3).predict_row(&[0.9]).unwrap();
        let want = (100.0 + 200.0 / 11.0) / (1.0 / 0.9 + 10.0 + 1.0 / 1.1);
        assert!((got - want).abs() < 1e-9 * want, "got {got}, want {want}");
    }

    #[test]
    fn coincident_training_points_average_as_a_group() {
        let x = one_feature(&[1.0, 1.0, 1.0, 5.0]);
        let model = fit_knn(&x, &[10.0, 20.0, 30.0, 99.0], 2, Standardizer::identity(1)).unwrap();
        assert_eq!(model.predict_row(&[1.0]).unwrap(), 20.0);
    }

    #[test]
    fn prediction_stays_within_neighbor_target_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(3..40);
            let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
            let x = Matrix::from_rows(&rows);
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 100.0).collect();
            let k = rng.random_range(1..=n);
            let model = fit_knn(&x, &y, k, Standardizer::fit(&x)).unwrap();

            let query = [rng.random(), rng.random()];
            let ranked = model.neighbors(&query).unwrap();
            let near: Vec<f64> = ranked[..k].iter().map(|nb| y[nb.index]).collect();
            let lo = near.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = near.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pred = model.predict_row(&query).unwrap();
            assert!(pred >= lo - 1e-9 && pred <= hi + 1e-9, "{pred} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn all_equal_distances_with_k_n_give_the_global_mean() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 2.0], [2.0, 0.0], [2.0, 2.0]]);
        let y = [1.0, 2.0, 3.0, 6.0];
        let model = fit_knn(&x, &y, 4, Standardizer::identity(2)).unwrap();
        let got = model.predict_row(&[1.0, 1.0]).unwrap();
        assert!((got - 3.0).abs() < 1e-12, "got {got}");
    }

    // Equal-distance tie groups here either sit entirely inside the first
    // k = 4 neighbors or entirely outside, so only summation order can vary.
    #[test]
    fn permuting_training_rows_never_changes_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let values = [0.0, 1.0, 1.0, 1.0, 3.0, 4.5, 6.0, 8.0];
        let targets = [5.0, 1.0, 2.0, 3.0, 7.0, 9.0, 11.0, 2.0];
        let x = one_feature(&values);
        let model = fit_knn(&x, &targets, 4, Standardizer::identity(1)).unwrap();

        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..values.len()).collect();
        for _ in 0..10 {
            order.shuffle(&mut rng);
            let px = one_feature(&order.iter().map(|&i| values[i]).collect::<Vec<_>>());
            let py: Vec<f64> = order.iter().map(|&i| targets[i]).collect();
            let permuted = fit_knn(&px, &py, 4, Standardizer::identity(1)).unwrap();
            for q in [[0.0], [1.0], [2.0], [4.5], [7.0]] {
                let a = model.predict_row(&q).unwrap();
                let b = permuted.predict_row(&q).unwrap();
                assert!((a - b).abs() < 1e-12, "query {q:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn neighbors_match_a_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.random_range(2..200);
            let rows: Vec<[f64; 3]> =
                (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
            let x = Matrix::from_rows(&rows);
            let y: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let model = fit_knn(&x, &y, 1, Standardizer::fit(&x)).unwrap();

            let query = [rng.random(), rng.random(), rng.random()];
            let z = model.standardizer().transform_row(&query);
            let mut oracle: Vec<(f64, usize)> = model
                .training_features()
                .iter_rows()
                .enumerate()
                .map(|(i, row)| {
                    let d: f64 = row.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d.sqrt(), i)
                })
                .collect();
            oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());

            let ranked = model.neighbors(&query).unwrap();
            for (nb, (d, i)) in ranked.iter().zip(&oracle) {
                assert_eq!(nb.index, *i);
                assert_eq!(nb.distance, *d);
            }
        }
    }

    #[test]
    fn single_candidate_is_returned_without_search() {
        let x = one_feature(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(select_k(&x, &y, &[5], 2, 42).unwrap(), 5);
    }

    #[test]
    fn dense_linear_data_prefers_the_smallest_k() {
        let values: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = values.iter().map(|v| 2.0 * v).collect();
        let x = one_feature(&values);
        assert_eq!(select_k(&x, &y, &[1, 50], 5, 42).unwrap(), 1);
    }

    #[test]
    fn pure_noise_prefers_the_largest_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..80).map(|_| rng.random()).collect();
        let y: Vec<f64> = (0..80).map(|_| rng.random()).collect();
        let x = one_feature(&values);
        assert_eq!(select_k(&x, &y, &[1, 25], 5, 42).unwrap(), 25);
    }

    #[test]
    fn oversized_candidate_is_rejected() {
        let x = one_feature(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = [0.0; 6];
        let got = select_k(&x, &y, &[5], 2, 42).unwrap_err();
        assert_eq!(got, KnnError::InvalidCandidate { k: 5, max: 3 });
    }

    #[test]
    fn select_k_matches_a_per_candidate_harness() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 40;
        let rows: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
        let x = Matrix::from_rows(&rows);
        let y: Vec<f64> = rows.iter().map(|r| r[0] * 10.0 + rng.random::<f64>()).collect();
        let candidates = [1, 2, 3, 5, 8, 13];
        let folds = 4;
        let seed = 99;

        let assignment = crate::validation::kfold(n, folds, seed).unwrap();
        let mut best = (f64::INFINITY, 0);
        for &k in &candidates {
            let mut mean_rmse = 0.0;
            for f in 0..folds {
                let train_idx = assignment.complement(f);
                let val_idx = assignment.fold(f);
                let train_x = x.select_rows(&train_idx);
                let train_y: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
                let model = fit_knn(&train_x, &train_y, k, Standardizer::fit(&train_x)).unwrap();
                let preds: Vec<f64> =
                    val_idx.iter().map(|&v| model.predict_row(x.row(v)).unwrap()).collect();
                let actual: Vec<f64> = val_idx.iter().map(|&v| y[v]).collect();
                mean_rmse += crate::metrics::rmse(&actual, &preds).unwrap() / folds as f64;
            }
            if mean_rmse < best.0 {
                best = (mean_rmse, k);
            }
        }

        assert_eq!(select_k(&x, &y, &candidates, folds, seed).unwrap(), best.1);
    }
}
