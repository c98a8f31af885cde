//! Level-1 supervised learners over the predictor table.
//!
//! Four algorithms are tuned by grid search with stratified k-fold
//! cross-validation on AUC, then refit on the full table. Grid cells are
//! enumerated in a fixed row-major order and ties keep the first cell, so
//! tuning is deterministic. Forests and boosted models evaluate their
//! `n_estimators` cells from one staged fit per depth; the result is
//! identical to fitting each cell separately because tree `i` depends only
//! on the seed stream for index `i`.

mod boost;
mod forest;
mod logreg;
mod svm;
mod tree;

pub use boost::{BoostParams, BoostedTrees, MultiClassBoost};
pub use forest::{Forest, ForestParams};
pub use logreg::{LogRegParams, LogisticRegression, Penalty};
pub use svm::{SvmModel, SvmParams};
pub use tree::{DecisionTree, FeatureView, SplitCriterion, TreeParams};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval;
use crate::predictors::FeatureMatrix;
use crate::rng::{self, derive_seed};
use crate::scalar::Real;

/// Serialized model container tag.
pub const MODEL_SCHEMA_VERSION: &str = "linkpred.stacker/1";

/// The four stacking algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StackerKind {
    Rf,
    Xgb,
    Lr,
    Svm,
}

impl StackerKind {
    pub fn name(&self) -> &'static str {
        match self {
            StackerKind::Rf => "RF",
            StackerKind::Xgb => "XGB",
            StackerKind::Lr => "LR",
            StackerKind::Svm => "SVM",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RF" => Some(StackerKind::Rf),
            "XGB" => Some(StackerKind::Xgb),
            "LR" => Some(StackerKind::Lr),
            "SVM" => Some(StackerKind::Svm),
            _ => None,
        }
    }
}

/// Hyperparameter search space per algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub rf_max_depth: Vec<usize>,
    pub rf_n_estimators: Vec<usize>,
    pub xgb_n_estimators: Vec<usize>,
    pub xgb_max_depth: Vec<usize>,
    pub xgb_learning_rate: f64,
    pub xgb_subsample: f64,
    pub xgb_colsample_bytree: f64,
    pub xgb_gamma: f64,
    pub lr_c: Vec<f64>,
    pub lr_penalty: Vec<Penalty>,
    pub svm_c: Vec<f64>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            rf_max_depth: vec![3, 6, 9],
            rf_n_estimators: vec![25, 50, 100, 125],
            xgb_n_estimators: vec![50, 100, 200],
            xgb_max_depth: vec![5, 10, 25, 50],
            xgb_learning_rate: 0.1,
            xgb_subsample: 1.0,
            xgb_colsample_bytree: 0.7,
            xgb_gamma: 0.5,
            lr_c: vec![0.1, 1.0, 10.0, 100.0],
            lr_penalty: vec![Penalty::L1, Penalty::L2],
            svm_c: vec![0.1, 1.0, 10.0, 100.0],
        }
    }
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StackerParams {
    Rf { max_depth: usize, n_estimators: usize },
    Xgb { max_depth: usize, n_estimators: usize },
    Lr { c: f64, penalty: Penalty },
    Svm { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StackerModel<F> {
    Rf(Forest<F>),
    Xgb(BoostedTrees<F>),
    Lr(LogisticRegression<F>),
    Svm(SvmModel<F>),
}

/// A tuned, fitted level-1 model plus its training metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedStacker<F> {
    pub kind: StackerKind,
    pub params: StackerParams,
    pub model: StackerModel<F>,
    pub columns: Vec<String>,
    pub seed: u64,
    pub cv_auc: f64,
    /// Mean validation AUC of every explored cell, in grid order.
    pub grid_log: Vec<(StackerParams, f64)>,
}

/// Stratified fold assignment: rows of each class are shuffled and dealt
/// round-robin. Returns validation index lists per fold.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        per_class[(l == 1) as usize].push(i);
    }
    let mut rng = rng::rng_from_seed(seed);
    let mut out = vec![Vec::new(); folds];
    for class_rows in per_class.iter_mut() {
        rng::shuffle(&mut rng, class_rows);
        for (i, &row) in class_rows.iter().enumerate() {
            out[i % folds].push(row);
        }
    }
    for fold in out.iter_mut() {
        fold.sort_unstable();
    }
    out
}

fn targets_of<F: Real>(matrix: &FeatureMatrix<F>) -> Vec<F> {
    matrix.labels().iter().map(|&l| F::of_usize(l as usize)).collect()
}

fn fold_auc<F: Real>(scores: &[F], labels: &[u8]) -> f64 {
    let pos: Vec<F> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<F> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(&s, _)| s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return 0.5;
    }
    eval::auc(&pos, &neg).map(|a| a.as_f64()).unwrap_or(0.5)
}

struct Fold<F> {
    train: FeatureMatrix<F>,
    val: FeatureMatrix<F>,
}

fn make_folds<F: Real>(matrix: &FeatureMatrix<F>, folds: usize, seed: u64) -> Vec<Fold<F>> {
    let assignment = stratified_folds(matrix.labels(), folds, seed);
    assignment
        .iter()
        .map(|val_idx| {
            let val_set: std::collections::HashSet<usize> = val_idx.iter().copied().collect();
            let train_idx: Vec<usize> =
                (0..matrix.n_rows()).filter(|r| !val_set.contains(r)).collect();
            Fold {
                train: matrix.select(&train_idx),
                val: matrix.select(val_idx),
            }
        })
        .collect()
}

/// Tune one algorithm by grid search with stratified CV on AUC, then refit
/// the best cell on the full table.
pub fn train_stacker<F: Real>(
    kind: StackerKind,
    matrix: &FeatureMatrix<F>,
    grid: &HyperGrid,
    folds: usize,
    seed: u64,
) -> Result<TrainedStacker<F>> {
    if folds < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    let (neg, pos) = matrix.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::Degenerate(
            "training labels contain a single class".into(),
        ));
    }

    let fold_data = make_folds(matrix, folds, derive_seed(seed, 7001));
    let grid_log = match kind {
        StackerKind::Rf => rf_grid(matrix, &fold_data, grid, seed),
        StackerKind::Xgb => xgb_grid(matrix, &fold_data, grid, seed),
        StackerKind::Lr => lr_grid(&fold_data, grid),
        StackerKind::Svm => svm_grid(&fold_data, grid),
    };

    // first strictly-better cell wins; ties keep the earlier cell
    let mut best_idx = 0usize;
    for (i, cell) in grid_log.iter().enumerate() {
        if cell.1 > grid_log[best_idx].1 + 1e-15 {
            best_idx = i;
        }
    }
    let (params, cv_auc) = grid_log[best_idx];
    log::debug!(
        "{}: chose {:?} with cv auc {:.4} over {} cells",
        kind.name(),
        params,
        cv_auc,
        grid_log.len()
    );

    let refit_seed = derive_seed(seed, 9001);
    let targets = targets_of(matrix);
    let model = fit_cell(matrix, &targets, kind, params, grid, refit_seed);

    Ok(TrainedStacker {
        kind,
        params,
        model,
        columns: matrix.columns().to_vec(),
        seed,
        cv_auc,
        grid_log,
    })
}

fn fit_cell<F: Real>(
    matrix: &FeatureMatrix<F>,
    targets: &[F],
    kind: StackerKind,
    params: StackerParams,
    grid: &HyperGrid,
    seed: u64,
) -> StackerModel<F> {
    match (kind, params) {
        (StackerKind::Rf, StackerParams::Rf { max_depth, n_estimators }) => {
            StackerModel::Rf(Forest::fit(
                matrix,
                targets,
                ForestParams {
                    n_estimators,
                    max_depth,
                    max_features: None,
                    criterion: SplitCriterion::Gini,
                },
                seed,
            ))
        }
        (StackerKind::Xgb, StackerParams::Xgb { max_depth, n_estimators }) => {
            StackerModel::Xgb(BoostedTrees::fit(
                matrix,
                targets,
                BoostParams {
                    n_estimators,
                    max_depth,
                    learning_rate: grid.xgb_learning_rate,
                    subsample: grid.xgb_subsample,
                    colsample_bytree: grid.xgb_colsample_bytree,
                    gamma: grid.xgb_gamma,
                    ..BoostParams::default()
                },
                seed,
            ))
        }
        (StackerKind::Lr, StackerParams::Lr { c, penalty }) => {
            StackerModel::Lr(LogisticRegression::fit(
                matrix,
                targets,
                LogRegParams {
                    c,
                    penalty,
                    ..LogRegParams::default()
                },
            ))
        }
        (StackerKind::Svm, StackerParams::Svm { c }) => StackerModel::Svm(SvmModel::fit(
            matrix,
            targets,
            SvmParams {
                c,
                ..SvmParams::default()
            },
        )),
        _ => unreachable!("kind/params mismatch"),
    }
}

fn rf_grid<F: Real>(
    matrix: &FeatureMatrix<F>,
    folds: &[Fold<F>],
    grid: &HyperGrid,
    seed: u64,
) -> Vec<(StackerParams, f64)> {
    let _ = matrix;
    let max_estimators = grid.rf_n_estimators.iter().copied().max().unwrap_or(100);
    // per (depth, fold): one staged fit scored at every estimator count
    let cell_aucs: Vec<Vec<Vec<f64>>> = grid
        .rf_max_depth
        .par_iter()
        .enumerate()
        .map(|(di, &depth)| {
            folds
                .par_iter()
                .enumerate()
                .map(|(fi, fold)| {
                    let targets = targets_of(&fold.train);
                    let forest = Forest::fit(
                        &fold.train,
                        &targets,
                        ForestParams {
                            n_estimators: max_estimators,
                            max_depth: depth,
                            max_features: None,
                            criterion: SplitCriterion::Gini,
                        },
                        derive_seed(seed, (di * 100 + fi) as u64 + 11),
                    );
                    grid.rf_n_estimators
                        .iter()
                        .map(|&k| {
                            let scores: Vec<F> = (0..fold.val.n_rows())
                                .map(|r| forest.predict_row_prefix(fold.val.row(r), k))
                                .collect();
                            fold_auc(&scores, fold.val.labels())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for (di, &depth) in grid.rf_max_depth.iter().enumerate() {
        for (ki, &k) in grid.rf_n_estimators.iter().enumerate() {
            let mean: f64 = cell_aucs[di].iter().map(|per_fold| per_fold[ki]).sum::<f64>()
                / folds.len() as f64;
            out.push((
                StackerParams::Rf {
                    max_depth: depth,
                    n_estimators: k,
                },
                mean,
            ));
        }
    }
    out
}

fn xgb_grid<F: Real>(
    matrix: &FeatureMatrix<F>,
    folds: &[Fold<F>],
    grid: &HyperGrid,
    seed: u64,
) -> Vec<(StackerParams, f64)> {
    let _ = matrix;
    let max_rounds = grid.xgb_n_estimators.iter().copied().max().unwrap_or(100);
    let cell_aucs: Vec<Vec<Vec<f64>>> = grid
        .xgb_max_depth
        .par_iter()
        .enumerate()
        .map(|(di, &depth)| {
            folds
                .par_iter()
                .enumerate()
                .map(|(fi, fold)| {
                    let targets = targets_of(&fold.train);
                    let booster = BoostedTrees::fit(
                        &fold.train,
                        &targets,
                        BoostParams {
                            n_estimators: max_rounds,
                            max_depth: depth,
                            learning_rate: grid.xgb_learning_rate,
                            subsample: grid.xgb_subsample,
                            colsample_bytree: grid.xgb_colsample_bytree,
                            gamma: grid.xgb_gamma,
                            ..BoostParams::default()
                        },
                        derive_seed(seed, (di * 100 + fi) as u64 + 21),
                    );
                    grid.xgb_n_estimators
                        .iter()
                        .map(|&k| {
                            let scores: Vec<F> = (0..fold.val.n_rows())
                                .map(|r| booster.predict_row_prefix(fold.val.row(r), k))
                                .collect();
                            fold_auc(&scores, fold.val.labels())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for (di, &depth) in grid.xgb_max_depth.iter().enumerate() {
        for (ki, &k) in grid.xgb_n_estimators.iter().enumerate() {
            let mean: f64 = cell_aucs[di].iter().map(|per_fold| per_fold[ki]).sum::<f64>()
                / folds.len() as f64;
            out.push((
                StackerParams::Xgb {
                    max_depth: depth,
                    n_estimators: k,
                },
                mean,
            ));
        }
    }
    out
}

fn lr_grid<F: Real>(folds: &[Fold<F>], grid: &HyperGrid) -> Vec<(StackerParams, f64)> {
    let cells: Vec<(f64, Penalty)> = grid
        .lr_c
        .iter()
        .flat_map(|&c| grid.lr_penalty.iter().map(move |&p| (c, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(c, penalty)| {
            let mean: f64 = folds
                .iter()
                .map(|fold| {
                    let targets = targets_of(&fold.train);
                    let model = LogisticRegression::fit(
                        &fold.train,
                        &targets,
                        LogRegParams {
                            c,
                            penalty,
                            ..LogRegParams::default()
                        },
                    );
                    let scores: Vec<F> = (0..fold.val.n_rows())
                        .map(|r| model.predict_row(fold.val.row(r)))
                        .collect();
                    fold_auc(&scores, fold.val.labels())
                })
                .sum::<f64>()
                / folds.len() as f64;
            (StackerParams::Lr { c, penalty }, mean)
        })
        .collect()
}

fn svm_grid<F: Real>(folds: &[Fold<F>], grid: &HyperGrid) -> Vec<(StackerParams, f64)> {
    grid.svm_c
        .par_iter()
        .map(|&c| {
            let mean: f64 = folds
                .iter()
                .map(|fold| {
                    let targets = targets_of(&fold.train);
                    let model = SvmModel::fit(
                        &fold.train,
                        &targets,
                        SvmParams {
                            c,
                            ..SvmParams::default()
                        },
                    );
                    let scores: Vec<F> = (0..fold.val.n_rows())
                        .map(|r| model.predict_row(fold.val.row(r)))
                        .collect();
                    fold_auc(&scores, fold.val.labels())
                })
                .sum::<f64>()
                / folds.len() as f64;
            (StackerParams::Svm { c }, mean)
        })
        .collect()
}

impl<F: Real> TrainedStacker<F> {
    /// Score each row of a table with the same column schema as training.
    pub fn predict_scores(&self, matrix: &FeatureMatrix<F>) -> Result<Vec<F>> {
        if matrix.columns() != &self.columns[..] {
            return Err(Error::SchemaMismatch {
                expected: self.columns.join(","),
                found: matrix.columns().join(","),
            });
        }
        Ok((0..matrix.n_rows())
            .map(|r| self.predict_row(matrix.row(r)))
            .collect())
    }

    pub fn predict_row(&self, row: &[F]) -> F {
        match &self.model {
            StackerModel::Rf(m) => m.predict_row(row),
            StackerModel::Xgb(m) => m.predict_row(row),
            StackerModel::Lr(m) => m.predict_row(row),
            StackerModel::Svm(m) => m.predict_row(row),
        }
    }

    /// Self-describing JSON container.
    pub fn to_json(&self) -> Result<String> {
        let wrapper = serde_json::json!({
            "schema": MODEL_SCHEMA_VERSION,
            "model": self,
        });
        Ok(serde_json::to_string(&wrapper)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("schema").and_then(|s| s.as_str()) != Some(MODEL_SCHEMA_VERSION) {
            return Err(Error::Format("unsupported stacker container".into()));
        }
        Ok(serde_json::from_value(
            v.get("model")
                .cloned()
                .ok_or_else(|| Error::Format("missing model body".into()))?,
        )?)
    }

    /// Stable content digest of the fitted model.
    pub fn digest(&self) -> Result<String> {
        let json = self.to_json()?;
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        Ok(format!("{:x}", hasher.finalize()))
    }
}
