//! CART decision trees over feature tables.
//!
//! One tree type serves classification (Gini on 0/1 targets, leaf value is
//! the positive fraction) and regression (variance reduction, leaf value is
//! the mean). Split ties break toward the lowest feature index and lowest
//! threshold so fits are deterministic.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::scalar::Real;

/// Read access to a row-major feature table.
pub trait FeatureView<F> {
    fn feature(&self, row: usize, col: usize) -> F;
    fn width(&self) -> usize;
}

impl<F: Real> FeatureView<F> for crate::predictors::FeatureMatrix<F> {
    fn feature(&self, row: usize, col: usize) -> F {
        self.row(row)[col]
    }
    fn width(&self) -> usize {
        self.n_cols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCriterion {
    /// Binary-class Gini impurity; targets must be 0 or 1.
    Gini,
    /// Variance reduction for real-valued targets.
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features considered per split; `None` means all.
    pub max_features: Option<usize>,
    pub criterion: SplitCriterion,
}

impl TreeParams {
    pub fn classification(max_depth: usize) -> Self {
        TreeParams {
            max_depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
            criterion: SplitCriterion::Gini,
        }
    }

    pub fn regression(max_depth: usize) -> Self {
        TreeParams {
            max_depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: None,
            criterion: SplitCriterion::Variance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node<F> {
    Leaf {
        value: F,
    },
    Split {
        feature: usize,
        threshold: F,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<F> {
    nodes: Vec<Node<F>>,
    n_features: usize,
    /// Unnormalized impurity decrease per feature.
    importances: Vec<F>,
}

/// Node impurity from target aggregates: Gini `2p(1-p)` or variance.
fn impurity<F: Real>(criterion: SplitCriterion, sum: F, sum_sq: F, count: F) -> F {
    match criterion {
        SplitCriterion::Gini => {
            let p = sum / count;
            F::of_f64(2.0) * p * (F::one() - p)
        }
        SplitCriterion::Variance => sum_sq / count - (sum / count) * (sum / count),
    }
}

struct Builder<'a, F, V: FeatureView<F>> {
    view: &'a V,
    targets: &'a [F],
    params: TreeParams,
    nodes: Vec<Node<F>>,
    importances: Vec<F>,
    n_total: F,
}

impl<'a, F: Real, V: FeatureView<F>> Builder<'a, F, V> {
    fn leaf(&mut self, indices: &[usize]) -> usize {
        let sum: F = indices.iter().map(|&i| self.targets[i]).sum();
        let value = sum / F::of_usize(indices.len());
        self.nodes.push(Node::Leaf { value });
        self.nodes.len() - 1
    }

    fn build(&mut self, indices: &mut Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let n = indices.len();
        let count = F::of_usize(n);
        let sum: F = indices.iter().map(|&i| self.targets[i]).sum();
        let sum_sq: F = indices.iter().map(|&i| self.targets[i] * self.targets[i]).sum();
        let node_impurity = impurity(self.params.criterion, sum, sum_sq, count);

        if depth >= self.params.max_depth
            || n < self.params.min_samples_split
            || node_impurity <= F::of_f64(1e-15)
        {
            return self.leaf(indices);
        }

        // candidate features, ascending for deterministic tie-breaks
        let d = self.view.width();
        let candidates: Vec<usize> = match self.params.max_features {
            Some(k) if k < d => {
                let mut picked = rng::sample_indices(rng, d, k);
                picked.sort_unstable();
                picked
            }
            _ => (0..d).collect(),
        };

        let mut best: Option<(F, usize, F)> = None; // (decrease, feature, threshold)
        let mut sorted = indices.clone();
        for &f in &candidates {
            sorted.sort_by(|&a, &b| {
                self.view
                    .feature(a, f)
                    .partial_cmp(&self.view.feature(b, f))
                    .expect("features must not be NaN")
            });
            let mut left_sum = F::zero();
            let mut left_sq = F::zero();
            for cut in 1..n {
                let t = self.targets[sorted[cut - 1]];
                left_sum += t;
                left_sq += t * t;
                let prev = self.view.feature(sorted[cut - 1], f);
                let here = self.view.feature(sorted[cut], f);
                if prev == here {
                    continue;
                }
                if cut < self.params.min_samples_leaf || n - cut < self.params.min_samples_leaf {
                    continue;
                }
                let lc = F::of_usize(cut);
                let rc = F::of_usize(n - cut);
                let li = impurity(self.params.criterion, left_sum, left_sq, lc);
                let ri = impurity(
                    self.params.criterion,
                    sum - left_sum,
                    sum_sq - left_sq,
                    rc,
                );
                let weighted = (lc * li + rc * ri) / count;
                let decrease = node_impurity - weighted;
                let improves = match &best {
                    None => decrease > F::of_f64(1e-15),
                    Some((b, _, _)) => decrease > *b + F::of_f64(1e-15),
                };
                if improves {
                    // midpoint can round up to `here` for adjacent floats,
                    // which would empty the right child; fall back to prev
                    let mid = (prev + here) / F::of_f64(2.0);
                    let threshold = if mid < here { mid } else { prev };
                    best = Some((decrease, f, threshold));
                }
            }
        }

        let Some((decrease, feature, threshold)) = best else {
            return self.leaf(indices);
        };

        let (mut left, mut right): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.view.feature(i, feature) <= threshold);
        if left.is_empty() || right.is_empty() {
            debug_assert!(false, "degenerate split on feature {feature}");
            return self.leaf(indices);
        }
        self.importances[feature] += count / self.n_total * decrease;
        let placeholder = self.nodes.len();
        self.nodes.push(Node::Leaf { value: F::zero() });
        let l = self.build(&mut left, depth + 1, rng);
        let r = self.build(&mut right, depth + 1, rng);
        self.nodes[placeholder] = Node::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        placeholder
    }
}

impl<F: Real> DecisionTree<F> {
    /// Fit a tree on the given sample indices.
    pub fn fit<V: FeatureView<F>>(
        view: &V,
        targets: &[F],
        indices: &[usize],
        params: TreeParams,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        assert!(!indices.is_empty(), "cannot fit a tree on zero samples");
        let mut builder = Builder {
            view,
            targets,
            params,
            nodes: Vec::new(),
            importances: vec![F::zero(); view.width()],
            n_total: F::of_usize(indices.len()),
        };
        let mut idx = indices.to_vec();
        let root = builder.build(&mut idx, 0, rng);
        debug_assert_eq!(root, 0);
        DecisionTree {
            nodes: builder.nodes,
            n_features: view.width(),
            importances: builder.importances,
        }
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Unnormalized impurity-decrease importances.
    pub fn importances(&self) -> &[F] {
        &self.importances
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}
