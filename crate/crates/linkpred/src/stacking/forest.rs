//! Bagged tree ensembles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{self, derive_seed};
use crate::scalar::Real;

use super::tree::{DecisionTree, FeatureView, SplitCriterion, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    /// Features per split; `None` means sqrt(d) for classification and all
    /// features for regression.
    pub max_features: Option<usize>,
    pub criterion: SplitCriterion,
}

/// Bootstrap forest. Tree `i` depends only on `(data, params, seed, i)`, so
/// a forest with fewer estimators is a prefix of a larger one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<F> {
    pub params: ForestParams,
    trees: Vec<DecisionTree<F>>,
    seed: u64,
}

impl<F: Real> Forest<F> {
    pub fn fit<V: FeatureView<F> + Sync>(view: &V, targets: &[F], params: ForestParams, seed: u64) -> Self
    where
        F: Send,
    {
        let n = targets.len();
        assert!(n > 0, "cannot fit a forest on zero rows");
        let d = view.width();
        let max_features = params.max_features.or(match params.criterion {
            SplitCriterion::Gini => Some((d as f64).sqrt().round().max(1.0) as usize),
            SplitCriterion::Variance => None,
        });
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features,
            criterion: params.criterion,
        };
        let trees: Vec<DecisionTree<F>> = (0..params.n_estimators)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::rng_from_seed(derive_seed(seed, i as u64 + 1));
                // bootstrap sample of n rows with replacement
                let indices: Vec<usize> =
                    (0..n).map(|_| rng::uniform_usize(&mut rng, n)).collect();
                DecisionTree::fit(view, targets, &indices, tree_params, &mut rng)
            })
            .collect();
        Forest {
            params,
            trees,
            seed,
        }
    }

    /// Mean of per-tree leaf values; a probability for classification
    /// forests, a regression estimate otherwise.
    pub fn predict_row(&self, row: &[F]) -> F {
        self.predict_row_prefix(row, self.trees.len())
    }

    /// Prediction using only the first `k` trees (grid evaluation over
    /// `n_estimators` reuses one fit).
    pub fn predict_row_prefix(&self, row: &[F], k: usize) -> F {
        let k = k.min(self.trees.len()).max(1);
        let sum: F = self.trees[..k].iter().map(|t| t.predict_row(row)).sum();
        sum / F::of_usize(k)
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean of per-tree normalized impurity importances, renormalized to
    /// sum to one. All-zero when no tree found a split.
    pub fn feature_importances(&self) -> Vec<F> {
        let d = self
            .trees
            .first()
            .map(|t| t.n_features())
            .unwrap_or(0);
        let mut acc = vec![F::zero(); d];
        let mut used = 0usize;
        for t in &self.trees {
            let imp = t.importances();
            let total: F = imp.iter().copied().sum();
            if total > F::zero() {
                for (a, &v) in acc.iter_mut().zip(imp) {
                    *a += v / total;
                }
                used += 1;
            }
        }
        if used == 0 {
            return acc;
        }
        let mut out: Vec<F> = acc.into_iter().map(|v| v / F::of_usize(used)).collect();
        let total: F = out.iter().copied().sum();
        if total > F::zero() {
            for v in out.iter_mut() {
                *v /= total;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::FeatureMatrix;

    fn blobs(n_per: usize, seed: u64) -> FeatureMatrix<f64> {
        let mut r = rng::rng_from_seed(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n_per {
            rows.push(vec![rng::uniform_f64(&mut r), rng::uniform_f64(&mut r)]);
            labels.push(0u8);
            rows.push(vec![
                rng::uniform_f64(&mut r) + 3.0,
                rng::uniform_f64(&mut r) + 3.0,
            ]);
            labels.push(1u8);
        }
        let cols = vec!["x".into(), "y".into()];
        let pairs: Vec<(usize, usize)> = (0..rows.len()).map(|i| (i, i + 1)).collect();
        FeatureMatrix::from_rows(cols, pairs, rows, labels).unwrap()
    }

    #[test]
    fn classifies_separated_blobs() {
        let m = blobs(40, 1);
        let targets: Vec<f64> = m.labels().iter().map(|&l| l as f64).collect();
        let f = Forest::fit(
            &m,
            &targets,
            ForestParams {
                n_estimators: 25,
                max_depth: 4,
                max_features: None,
                criterion: SplitCriterion::Gini,
            },
            7,
        );
        assert!(f.predict_row(&[0.5, 0.5]) < 0.2);
        assert!(f.predict_row(&[3.5, 3.5]) > 0.8);
    }

    #[test]
    fn prefix_prediction_matches_smaller_forest() {
        let m = blobs(30, 2);
        let targets: Vec<f64> = m.labels().iter().map(|&l| l as f64).collect();
        let big = Forest::fit(
            &m,
            &targets,
            ForestParams {
                n_estimators: 50,
                max_depth: 3,
                max_features: None,
                criterion: SplitCriterion::Gini,
            },
            11,
        );
        let small = Forest::fit(
            &m,
            &targets,
            ForestParams {
                n_estimators: 20,
                max_depth: 3,
                max_features: None,
                criterion: SplitCriterion::Gini,
            },
            11,
        );
        for r in 0..m.n_rows() {
            let a = big.predict_row_prefix(m.row(r), 20);
            let b = small.predict_row(m.row(r));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn importances_normalized() {
        let m = blobs(30, 3);
        let targets: Vec<f64> = m.labels().iter().map(|&l| l as f64).collect();
        let f = Forest::fit(
            &m,
            &targets,
            ForestParams {
                n_estimators: 10,
                max_depth: 3,
                max_features: None,
                criterion: SplitCriterion::Gini,
            },
            5,
        );
        let imp = f.feature_importances();
        let s: f64 = imp.iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
        assert!(imp.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn deterministic_per_seed_and_parallelism() {
        let m = blobs(20, 4);
        let targets: Vec<f64> = m.labels().iter().map(|&l| l as f64).collect();
        let p = ForestParams {
            n_estimators: 15,
            max_depth: 3,
            max_features: Some(1),
            criterion: SplitCriterion::Gini,
        };
        let a = Forest::fit(&m, &targets, p, 9);
        let b = Forest::fit(&m, &targets, p, 9);
        assert_eq!(a, b);
    }
}
