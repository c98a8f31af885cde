//! Second-order gradient boosting with logistic loss.
//!
//! Each round fits a regression tree to the per-row gradients and hessians
//! of the logistic loss; leaves carry weight `-G / (H + lambda)` and splits
//! are scored with the usual second-order gain minus `gamma`. Boosting is
//! sequential, so prefix predictions reproduce a shorter run exactly.

use serde::{Deserialize, Serialize};

use crate::rng::{self, derive_seed};
use crate::scalar::Real;

use super::tree::FeatureView;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Row fraction drawn per round (without replacement).
    pub subsample: f64,
    /// Column fraction drawn per tree.
    pub colsample_bytree: f64,
    /// Minimum split gain.
    pub gamma: f64,
    /// L2 penalty on leaf weights.
    pub reg_lambda: f64,
    /// Minimum hessian sum per child.
    pub min_child_weight: f64,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_estimators: 100,
            max_depth: 5,
            learning_rate: 0.1,
            subsample: 1.0,
            colsample_bytree: 0.7,
            gamma: 0.5,
            reg_lambda: 1.0,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum BNode<F> {
    Leaf {
        weight: F,
    },
    Split {
        feature: usize,
        threshold: F,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BoostTree<F> {
    nodes: Vec<BNode<F>>,
}

impl<F: Real> BoostTree<F> {
    fn leaf_weight(&self, row: &[F]) -> F {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                BNode::Leaf { weight } => return *weight,
                BNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees<F> {
    pub params: BoostParams,
    trees: Vec<BoostTree<F>>,
    seed: u64,
}

fn sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

struct TreeBuilder<'a, F, V: FeatureView<F>> {
    view: &'a V,
    grad: &'a [F],
    hess: &'a [F],
    params: BoostParams,
    columns: &'a [usize],
    nodes: Vec<BNode<F>>,
}

impl<'a, F: Real, V: FeatureView<F>> TreeBuilder<'a, F, V> {
    fn leaf(&mut self, g: F, h: F) -> usize {
        let weight = -g / (h + F::of_f64(self.params.reg_lambda));
        self.nodes.push(BNode::Leaf { weight });
        self.nodes.len() - 1
    }

    fn build(&mut self, indices: &mut Vec<usize>, depth: usize) -> usize {
        let g_total: F = indices.iter().map(|&i| self.grad[i]).sum();
        let h_total: F = indices.iter().map(|&i| self.hess[i]).sum();
        if depth >= self.params.max_depth || indices.len() < 2 {
            return self.leaf(g_total, h_total);
        }

        let lambda = F::of_f64(self.params.reg_lambda);
        let half = F::of_f64(0.5);
        let parent_score = g_total * g_total / (h_total + lambda);
        let min_h = F::of_f64(self.params.min_child_weight);

        let mut best: Option<(F, usize, F)> = None;
        let mut sorted = indices.clone();
        for &f in self.columns {
            sorted.sort_by(|&a, &b| {
                self.view
                    .feature(a, f)
                    .partial_cmp(&self.view.feature(b, f))
                    .expect("features must not be NaN")
            });
            let mut gl = F::zero();
            let mut hl = F::zero();
            for cut in 1..sorted.len() {
                gl += self.grad[sorted[cut - 1]];
                hl += self.hess[sorted[cut - 1]];
                let prev = self.view.feature(sorted[cut - 1], f);
                let here = self.view.feature(sorted[cut], f);
                if prev == here {
                    continue;
                }
                let gr = g_total - gl;
                let hr = h_total - hl;
                if hl < min_h || hr < min_h {
                    continue;
                }
                let gain = half
                    * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score)
                    - F::of_f64(self.params.gamma);
                let improves = match &best {
                    None => gain > F::zero(),
                    Some((b, _, _)) => gain > *b + F::of_f64(1e-15),
                };
                if improves {
                    // keep the right child nonempty when the midpoint
                    // rounds up to `here`
                    let mid = (prev + here) / F::of_f64(2.0);
                    let threshold = if mid < here { mid } else { prev };
                    best = Some((gain, f, threshold));
                }
            }
        }

        let Some((_, feature, threshold)) = best else {
            return self.leaf(g_total, h_total);
        };
        let (mut left, mut right): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| self.view.feature(i, feature) <= threshold);
        if left.is_empty() || right.is_empty() {
            debug_assert!(false, "degenerate split on feature {feature}");
            return self.leaf(g_total, h_total);
        }
        let placeholder = self.nodes.len();
        self.nodes.push(BNode::Leaf { weight: F::zero() });
        let l = self.build(&mut left, depth + 1);
        let r = self.build(&mut right, depth + 1);
        self.nodes[placeholder] = BNode::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        placeholder
    }
}

impl<F: Real> BoostedTrees<F> {
    /// Fit on binary 0/1 targets.
    pub fn fit<V: FeatureView<F>>(view: &V, targets: &[F], params: BoostParams, seed: u64) -> Self {
        let n = targets.len();
        assert!(n > 0, "cannot boost on zero rows");
        let d = view.width();
        let mut scores = vec![F::zero(); n]; // logit space
        let mut trees = Vec::with_capacity(params.n_estimators);
        let lr = F::of_f64(params.learning_rate);

        for round in 0..params.n_estimators {
            let mut rng = rng::rng_from_seed(derive_seed(seed, round as u64 + 1));
            let grad: Vec<F> = scores
                .iter()
                .zip(targets)
                .map(|(&s, &y)| sigmoid(s) - y)
                .collect();
            let hess: Vec<F> = scores
                .iter()
                .map(|&s| {
                    let p = sigmoid(s);
                    p * (F::one() - p)
                })
                .collect();

            let rows: Vec<usize> = if params.subsample < 1.0 {
                let k = ((params.subsample * n as f64).round() as usize).clamp(1, n);
                let mut picked = rng::sample_indices(&mut rng, n, k);
                picked.sort_unstable();
                picked
            } else {
                (0..n).collect()
            };
            let columns: Vec<usize> = if params.colsample_bytree < 1.0 {
                let k = ((params.colsample_bytree * d as f64).round() as usize).clamp(1, d);
                let mut picked = rng::sample_indices(&mut rng, d, k);
                picked.sort_unstable();
                picked
            } else {
                (0..d).collect()
            };

            let mut builder = TreeBuilder {
                view,
                grad: &grad,
                hess: &hess,
                params,
                columns: &columns,
                nodes: Vec::new(),
            };
            let mut idx = rows;
            builder.build(&mut idx, 0);
            let tree = BoostTree {
                nodes: builder.nodes,
            };
            for (i, s) in scores.iter_mut().enumerate() {
                *s += lr * tree.leaf_weight(row_of(view, i, d).as_slice());
            }
            trees.push(tree);
        }
        BoostedTrees {
            params,
            trees,
            seed,
        }
    }

    /// Probability from the first `k` rounds.
    pub fn predict_row_prefix(&self, row: &[F], k: usize) -> F {
        let k = k.min(self.trees.len());
        let lr = F::of_f64(self.params.learning_rate);
        let logit: F = self.trees[..k]
            .iter()
            .map(|t| lr * t.leaf_weight(row))
            .sum();
        sigmoid(logit)
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        self.predict_row_prefix(row, self.trees.len())
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

fn row_of<F: Real, V: FeatureView<F>>(view: &V, i: usize, d: usize) -> Vec<F> {
    (0..d).map(|c| view.feature(i, c)).collect()
}

/// One-vs-rest multiclass wrapper; prediction is the class with the highest
/// binary score, ties to the lowest class index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiClassBoost<F> {
    pub n_classes: usize,
    models: Vec<BoostedTrees<F>>,
}

impl<F: Real> MultiClassBoost<F> {
    pub fn fit<V: FeatureView<F>>(
        view: &V,
        class_labels: &[usize],
        n_classes: usize,
        params: BoostParams,
        seed: u64,
    ) -> Self {
        let models = (0..n_classes)
            .map(|c| {
                let targets: Vec<F> = class_labels
                    .iter()
                    .map(|&l| if l == c { F::one() } else { F::zero() })
                    .collect();
                BoostedTrees::fit(view, &targets, params, derive_seed(seed, c as u64 + 101))
            })
            .collect();
        MultiClassBoost { n_classes, models }
    }

    pub fn predict_row(&self, row: &[F]) -> usize {
        let scores = self.class_scores(row);
        let mut best = 0usize;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }

    /// Per-class one-vs-rest probabilities, in class-index order.
    pub fn class_scores(&self, row: &[F]) -> Vec<F> {
        self.models.iter().map(|m| m.predict_row(row)).collect()
    }
}
