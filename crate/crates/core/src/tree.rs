//! CART-style binary regression tree with impurity-based feature importance.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::matrix::Matrix;

/// Stopping rules for tree growth. Defaults grow a full tree.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub min_impurity_decrease: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            min_impurity_decrease: 0.0,
        }
    }
}

impl TreeParams {
    /// Split-size bound with the `min_samples_split ≥ 2·min_samples_leaf`
    /// invariant applied.
    fn effective_min_split(&self) -> usize {
        self.min_samples_split.max(2 * self.min_samples_leaf).max(2)
    }
}

/// One node of a fitted tree.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        samples: usize,
        impurity: f64,
        impurity_decrease: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        prediction: f64,
        samples: usize,
    },
}

impl Node {
    pub fn samples(&self) -> usize {
        match self {
            Node::Internal { samples, .. } | Node::Leaf { samples, .. } => *samples,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Fitted regression tree.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tree {
    root: Node,
    feature_count: usize,
}

/// Winning split of one node: routing `x[feature] ≤ threshold` to the left.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted child variance (n_L·var_L + n_R·var_R)/n being minimized.
    pub objective: f64,
    pub left_count: usize,
    pub right_count: usize,
}

/// Invalid input to fitting or prediction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("cannot fit a tree on an empty dataset")]
    EmptyDataset,
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Normalized per-feature share of total impurity reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Importance {
    pub values: Vec<f64>,
    /// True when the tree has no internal node; `values` is then the
    /// uninformative uniform vector 1/p.
    pub all_leaves: bool,
}

/// Sum of squared deviations from the mean, computed from running sums and
/// clamped against cancellation noise.
fn sum_squared_deviations(sum: f64, sum_sq: f64, n: usize) -> f64 {
    (sum_sq - sum * sum / n as f64).max(0.0)
}

/// Exhaustive scan for the impurity-minimizing split of `subset`.
///
/// Candidate thresholds are midpoints between consecutive distinct sorted
/// values per feature; ties resolve to the lower feature index, then the
/// lower threshold.
pub fn best_split(
    features: &Matrix,
    target: &[f64],
    subset: &[usize],
    params: &TreeParams,
) -> Option<Split> {
    let n = subset.len();
    if n < 2 {
        return None;
    }
    let sum: f64 = subset.iter().map(|&i| target[i]).sum();
    let sum_sq: f64 = subset.iter().map(|&i| target[i] * target[i]).sum();
    let parent_impurity = sum_squared_deviations(sum, sum_sq, n) / n as f64;

    let mut best: Option<Split> = None;
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
    for feature in 0..features.cols() {
        pairs.clear();
        pairs.extend(subset.iter().enumerate().map(|(pos, &i)| (features.get(i, feature), pos)));
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut left_sum = 0.0;
        let mut left_sum_sq = 0.0;
        for i in 1..n {
            let y = target[subset[pairs[i - 1].1]];
            left_sum += y;
            left_sum_sq += y * y;
            if pairs[i - 1].0 == pairs[i].0 {
                continue;
            }
            if i < params.min_samples_leaf || n - i < params.min_samples_leaf {
                continue;
            }
            let sse_left = sum_squared_deviations(left_sum, left_sum_sq, i);
            let sse_right = sum_squared_deviations(sum - left_sum, sum_sq - left_sum_sq, n - i);
            let objective = (sse_left + sse_right) / n as f64;
            if best.as_ref().is_none_or(|b| objective < b.objective) {
                best = Some(Split {
                    feature,
                    threshold: (pairs[i - 1].0 + pairs[i].0) / 2.0,
                    objective,
                    left_count: i,
                    right_count: n - i,
                });
            }
        }
    }
    best.filter(|b| parent_impurity - b.objective > params.min_impurity_decrease)
}

/// Grows a tree depth-first; rows with `x[feature] ≤ threshold` go left.
pub fn fit_tree(features: &Matrix, target: &[f64], params: &TreeParams) -> Result<Tree, TreeError> {
    assert_eq!(target.len(), features.rows(), "target length != row count");
    if features.rows() == 0 {
        return Err(TreeError::EmptyDataset);
    }
    let subset: Vec<usize> = (0..features.rows()).collect();
    let root = grow(features, target, subset, params, 0);
    Ok(Tree { root, feature_count: features.cols() })
}

fn grow(
    features: &Matrix,
    target: &[f64],
    subset: Vec<usize>,
    params: &TreeParams,
    depth: usize,
) -> Node {
    let n = subset.len();
    let sum: f64 = subset.iter().map(|&i| target[i]).sum();
    let sum_sq: f64 = subset.iter().map(|&i| target[i] * target[i]).sum();
    let impurity = sum_squared_deviations(sum, sum_sq, n) / n as f64;
    let prediction = sum / n as f64;

    let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
    if depth_reached || n < params.effective_min_split() {
        return Node::Leaf { prediction, samples: n };
    }
    let Some(split) = best_split(features, target, &subset, params) else {
        return Node::Leaf { prediction, samples: n };
    };

    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
        subset.iter().partition(|&&i| features.get(i, split.feature) <= split.threshold);
    Node::Internal {
        feature: split.feature,
        threshold: split.threshold,
        samples: n,
        impurity,
        impurity_decrease: impurity - split.objective,
        left: Box::new(grow(features, target, left_rows, params, depth + 1)),
        right: Box::new(grow(features, target, right_rows, params, depth + 1)),
    }
}

impl Tree {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    /// Routes one row to its leaf.
    pub fn predict_row(&self, row: &[f64]) -> Result<f64, TreeError> {
        if row.len() != self.feature_count {
            return Err(TreeError::DimensionMismatch {
                expected: self.feature_count,
                found: row.len(),
            });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { prediction, .. } => return Ok(*prediction),
                Node::Internal { feature, threshold, left, right, .. } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Predictions for every row of `features`.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<f64>, TreeError> {
        (0..features.rows()).map(|i| self.predict_row(features.row(i))).collect()
    }

    /// Per-feature share of (samples-weighted) impurity decrease, normalized
    /// to sum 1.
    pub fn importance(&self) -> Importance {
        let p = self.feature_count;
        let mut values = alloc::vec![0.0; p];
        let root_samples = self.root.samples() as f64;
        accumulate_importance(&self.root, root_samples, &mut values);
        let total: f64 = values.iter().sum();
        if total > 0.0 {
            for v in &mut values {
                *v /= total;
            }
            Importance { values, all_leaves: false }
        } else {
            Importance { values: alloc::vec![1.0 / p as f64; p], all_leaves: true }
        }
    }
}

fn accumulate_importance(node: &Node, root_samples: f64, values: &mut [f64]) {
    if let Node::Internal { feature, samples, impurity_decrease, left, right, .. } = node {
        values[*feature] += (*samples as f64 / root_samples) * impurity_decrease;
        accumulate_importance(left, root_samples, values);
        accumulate_importance(right, root_samples, values);
    }
}
