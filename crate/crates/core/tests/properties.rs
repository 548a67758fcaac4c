//! Randomized invariant checks for the numeric building blocks.

use proptest::prelude::*;
use windreg_core::linear::fit_linear;
use windreg_core::metrics::{mae, r2_ratio, r2_score, rmse};
use windreg_core::standardize::Standardizer;
use windreg_core::tree::{fit_tree, TreeParams};
use windreg_core::validation::{kfold, split_train_test};
use windreg_core::{knn, Matrix};

fn paired_values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 2..40)
}

fn unzip(pairs: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    pairs.iter().cloned().unzip()
}

fn matrix_and_target(
    max_rows: usize,
    max_cols: usize,
) -> impl Strategy<Value = (Matrix, Vec<f64>)> {
    (2..=max_rows, 1..=max_cols).prop_flat_map(|(rows, cols)| {
        (
            prop::collection::vec(-50.0..50.0f64, rows * cols),
            prop::collection::vec(-50.0..50.0f64, rows),
        )
            .prop_map(move |(data, target)| (Matrix::from_vec(rows, cols, data), target))
    })
}

proptest! {
    #[test]
    fn shifting_both_series_leaves_mae_and_rmse_unchanged(
        pairs in paired_values(),
        shift in -100.0..100.0f64,
    ) {
        let (actual, predicted) = unzip(&pairs);
        let shifted_actual: Vec<f64> = actual.iter().map(|v| v + shift).collect();
        let shifted_predicted: Vec<f64> = predicted.iter().map(|v| v + shift).collect();
        let tolerance = 1e-9 * (1.0 + shift.abs());
        prop_assert!(
            (mae(&actual, &predicted).unwrap()
                - mae(&shifted_actual, &shifted_predicted).unwrap())
            .abs()
                < tolerance
        );
        prop_assert!(
            (rmse(&actual, &predicted).unwrap()
                - rmse(&shifted_actual, &shifted_predicted).unwrap())
            .abs()
                < tolerance
        );
    }

    #[test]
    fn scaling_both_series_scales_mae_and_rmse_by_the_same_factor(
        pairs in paired_values(),
        scale in -10.0..10.0f64,
    ) {
        let (actual, predicted) = unzip(&pairs);
        let scaled_actual: Vec<f64> = actual.iter().map(|v| v * scale).collect();
        let scaled_predicted: Vec<f64> = predicted.iter().map(|v| v * scale).collect();
        let tolerance = 1e-9 * (1.0 + scale.abs());
        prop_assert!(
            (scale.abs() * mae(&actual, &predicted).unwrap()
                - mae(&scaled_actual, &scaled_predicted).unwrap())
            .abs()
                < tolerance
        );
        prop_assert!(
            (scale.abs() * rmse(&actual, &predicted).unwrap()
                - rmse(&scaled_actual, &scaled_predicted).unwrap())
            .abs()
                < tolerance
        );
    }

    #[test]
    fn rmse_never_falls_below_mae(pairs in paired_values()) {
        let (actual, predicted) = unzip(&pairs);
        let mean_absolute = mae(&actual, &predicted).unwrap();
        let root_mean_square = rmse(&actual, &predicted).unwrap();
        prop_assert!(root_mean_square >= mean_absolute - 1e-12 * (1.0 + mean_absolute));
    }

    #[test]
    fn r2_score_never_exceeds_one(pairs in paired_values()) {
        let (actual, predicted) = unzip(&pairs);
        prop_assume!(actual.iter().any(|v| *v != actual[0]));
        prop_assert!(r2_score(&actual, &predicted).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn both_r2_variants_agree_on_least_squares_training_predictions(
        (features, target) in matrix_and_target(30, 3),
    ) {
        prop_assume!(features.rows() > features.cols() + 1);
        let model = match fit_linear(&features, &target) {
            Ok(model) => model,
            Err(_) => return Ok(()),
        };
        let predicted = model.predict(&features).unwrap();
        let ratio = match r2_ratio(&target, &predicted) {
            Ok(ratio) => ratio,
            Err(_) => return Ok(()),
        };
        let score = r2_score(&target, &predicted).unwrap();
        prop_assert!((ratio - score).abs() < 1e-8 * (1.0 + ratio.abs()));
    }

    #[test]
    fn folds_partition_rows_with_sizes_that_differ_by_at_most_one(
        n in 2..200usize,
        k in 2..20usize,
        seed in any::<u64>(),
    ) {
        prop_assume!(k <= n);
        let folds = kfold(n, k, seed).unwrap();
        let base = n / k;
        let remainder = n % k;
        let mut seen = vec![false; n];
        for f in 0..k {
            let fold = folds.fold(f);
            let expected = base + usize::from(f < remainder);
            prop_assert_eq!(fold.len(), expected);
            for index in fold {
                prop_assert!(!seen[index]);
                seen[index] = true;
            }
        }
        prop_assert!(seen.iter().all(|&v| v));
    }

    #[test]
    fn train_and_test_indices_are_sorted_disjoint_and_complete(
        n in 2..500usize,
        fraction in 0.05..0.95f64,
        seed in any::<u64>(),
    ) {
        let (train, test) = match split_train_test(n, fraction, seed) {
            Ok(parts) => parts,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(test.len(), (fraction * n as f64).round() as usize);
        prop_assert!(train.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(test.windows(2).all(|w| w[0] < w[1]));
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn standardizer_round_trips_every_matrix(
        (features, _) in matrix_and_target(30, 5),
    ) {
        let standardizer = Standardizer::fit(&features);
        let recovered = standardizer.inverse_transform(&standardizer.transform(&features));
        for r in 0..features.rows() {
            for c in 0..features.cols() {
                let original = features.get(r, c);
                let back = recovered.get(r, c);
                prop_assert!((original - back).abs() < 1e-9 * (1.0 + original.abs()));
            }
        }
    }

    #[test]
    fn tree_importance_is_a_distribution(
        (features, target) in matrix_and_target(40, 4),
    ) {
        let tree = fit_tree(&features, &target, &TreeParams::default()).unwrap();
        let importance = tree.importance();
        prop_assert_eq!(importance.values.len(), features.cols());
        prop_assert!(importance.values.iter().all(|v| *v >= 0.0));
        let total: f64 = importance.values.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        if importance.all_leaves {
            let uniform = 1.0 / features.cols() as f64;
            prop_assert!(importance.values.iter().all(|v| (*v - uniform).abs() < 1e-12));
        }
    }

    #[test]
    fn knn_predictions_stay_inside_the_target_range(
        (features, target) in matrix_and_target(30, 3),
        k in 1..10usize,
        query in prop::collection::vec(-60.0..60.0f64, 3),
    ) {
        prop_assume!(k <= features.rows());
        let model = knn::fit_knn(&features, &target, k, Standardizer::fit(&features)).unwrap();
        let prediction = model.predict_row(&query[..features.cols()]).unwrap();
        let lowest = target.iter().cloned().fold(f64::INFINITY, f64::min);
        let highest = target.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(prediction >= lowest - 1e-9 && prediction <= highest + 1e-9);
    }
}
