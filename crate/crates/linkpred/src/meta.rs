//! Network profiling and best-algorithm selection.
//!
//! Six structural features summarize an observed network. A forest
//! regressor learns to predict the best achievable accuracy from them, a
//! boosted-tree classifier learns to name the best algorithm, and an
//! oracle baseline (argmax over measured accuracies) bounds both.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::predictors::{self, FeatureMatrix};
use crate::rng::{self, derive_seed};
use crate::scalar::Real;
use crate::stacking::{BoostParams, Forest, ForestParams, MultiClassBoost, SplitCriterion};

/// Serialized meta-model container tag.
pub const META_SCHEMA_VERSION: &str = "linkpred.meta/1";

/// Profile feature names, fixed order.
pub const META_FEATURE_NAMES: [&str; 6] = [
    "mean_local_clustering",
    "mean_geodesic",
    "degree_assortativity",
    "node_count",
    "mean_degree",
    "degree_variance",
];

/// The six candidate algorithms in fixed tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AlgorithmId {
    Rf,
    Xgb,
    Lr,
    Svm,
    Gcn,
    Sage,
}

/// Fixed enumeration order used for argmax tie-breaks.
pub const ALGORITHM_ORDER: [AlgorithmId; 6] = [
    AlgorithmId::Rf,
    AlgorithmId::Xgb,
    AlgorithmId::Lr,
    AlgorithmId::Svm,
    AlgorithmId::Gcn,
    AlgorithmId::Sage,
];

impl AlgorithmId {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Rf => "RF",
            AlgorithmId::Xgb => "XGB",
            AlgorithmId::Lr => "LR",
            AlgorithmId::Svm => "SVM",
            AlgorithmId::Gcn => "GCN",
            AlgorithmId::Sage => "SAGE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RF" => Some(AlgorithmId::Rf),
            "XGB" => Some(AlgorithmId::Xgb),
            "LR" => Some(AlgorithmId::Lr),
            "SVM" => Some(AlgorithmId::Svm),
            "GCN" => Some(AlgorithmId::Gcn),
            "SAGE" => Some(AlgorithmId::Sage),
            _ => None,
        }
    }
}

/// Which accuracy metric a meta model targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    Auc,
    Topk,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Auc => "auc",
            MetricKind::Topk => "topk",
        }
    }
}

/// Six structural features of an observed network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkProfile<F> {
    pub mean_local_clustering: F,
    /// Mean hop distance over reachable pairs; 0 when no pair is reachable.
    pub mean_geodesic: F,
    pub degree_assortativity: F,
    pub node_count: F,
    pub mean_degree: F,
    pub degree_variance: F,
}

impl<F: Real> NetworkProfile<F> {
    pub fn as_row(&self) -> [F; 6] {
        [
            self.mean_local_clustering,
            self.mean_geodesic,
            self.degree_assortativity,
            self.node_count,
            self.mean_degree,
            self.degree_variance,
        ]
    }
}

/// Compute the profile of an observed network.
pub fn network_profile<F: Real>(graph: &Graph) -> NetworkProfile<F> {
    let n = graph.node_count();
    let lcc = predictors::local_clustering::<F>(graph);
    let degrees: Vec<F> = (0..n).map(|v| F::of_usize(graph.degree(v))).collect();

    let mut dist_sum = 0usize;
    let mut dist_count = 0usize;
    for s in 0..n {
        for (t, d) in graph.bfs_distances(s).into_iter().enumerate() {
            if t != s && d != usize::MAX {
                dist_sum += d;
                dist_count += 1;
            }
        }
    }
    let mean_geodesic = if dist_count == 0 {
        F::zero()
    } else {
        F::of_usize(dist_sum) / F::of_usize(dist_count)
    };

    NetworkProfile {
        mean_local_clustering: crate::scalar::mean(&lcc),
        mean_geodesic,
        degree_assortativity: predictors::degree_assortativity(graph),
        node_count: F::of_usize(n),
        mean_degree: F::of_usize(2 * graph.edge_count()) / F::of_usize(n),
        degree_variance: crate::scalar::population_variance(&degrees),
    }
}

/// Measured accuracies of one algorithm on one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoMetrics {
    pub auc: f64,
    pub topk: f64,
}

impl AlgoMetrics {
    pub fn get(&self, metric: MetricKind) -> f64 {
        match metric {
            MetricKind::Auc => self.auc,
            MetricKind::Topk => self.topk,
        }
    }
}

/// One (network, variant) row of the meta dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub network_id: String,
    pub variant_seed: u64,
    pub profile: NetworkProfile<f64>,
    pub metrics: BTreeMap<AlgorithmId, AlgoMetrics>,
}

impl PerformanceRecord {
    /// Records missing any of the six algorithms are excluded from training.
    pub fn is_complete(&self) -> bool {
        ALGORITHM_ORDER.iter().all(|a| self.metrics.contains_key(a))
    }

    pub fn best_over(&self, metric: MetricKind, set: &[AlgorithmId]) -> (AlgorithmId, f64) {
        let mut best = set[0];
        let mut best_v = f64::NEG_INFINITY;
        for &a in set {
            let v = self.metrics[&a].get(metric);
            if v > best_v {
                best_v = v;
                best = a;
            }
        }
        (best, best_v)
    }
}

/// Argmax selection with the fixed-order tie-break.
pub fn oracle_select(
    record: &PerformanceRecord,
    metric: MetricKind,
    algorithm_set: &[AlgorithmId],
) -> AlgorithmId {
    record.best_over(metric, algorithm_set).0
}

/// Split record indices so all variants of one network land on one side.
pub fn grouped_split(
    records: &[PerformanceRecord],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0 < test_fraction && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must be in (0,1), got {test_fraction}"
        )));
    }
    let mut ids: Vec<&str> = Vec::new();
    for r in records {
        if !ids.contains(&r.network_id.as_str()) {
            ids.push(&r.network_id);
        }
    }
    if ids.len() < 2 {
        return Err(Error::Degenerate(
            "grouped split needs at least two distinct networks".into(),
        ));
    }
    let mut order: Vec<usize> = (0..ids.len()).collect();
    let mut r = rng::rng_from_seed(seed);
    rng::shuffle(&mut r, &mut order);
    let test_networks = ((test_fraction * ids.len() as f64).round() as usize)
        .clamp(1, ids.len() - 1);
    let test_ids: std::collections::HashSet<&str> = order[..test_networks]
        .iter()
        .map(|&i| ids[i])
        .collect();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        if test_ids.contains(rec.network_id.as_str()) {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    Ok((train, test))
}

fn profile_matrix(records: &[PerformanceRecord], indices: &[usize]) -> FeatureMatrix<f64> {
    let cols: Vec<String> = META_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| records[i].profile.as_row().to_vec())
        .collect();
    let pairs: Vec<(usize, usize)> = indices.iter().map(|&i| (i, i)).collect();
    FeatureMatrix::from_rows(cols, pairs, rows, vec![0; indices.len()]).expect("valid matrix")
}

/// Forest regressor for the best achievable accuracy of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRegressor {
    pub target: MetricKind,
    pub schema: Vec<String>,
    forest: Forest<f64>,
    /// Importances averaged across the repeated grouped splits.
    importances: Vec<f64>,
    /// Held-out r^2 per repeat (NaN sentinel when the target is constant).
    pub r2_runs: Vec<f64>,
}

const REGRESSOR_FOREST: ForestParams = ForestParams {
    n_estimators: 100,
    max_depth: 24,
    max_features: None,
    criterion: SplitCriterion::Variance,
};

fn r_squared(truth: &[f64], pred: &[f64]) -> f64 {
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean).powi(2)).sum();
    let ss_res: f64 = truth
        .iter()
        .zip(pred)
        .map(|(t, p)| (t - p).powi(2))
        .sum();
    if ss_tot <= 0.0 {
        log::warn!("constant regression target: r^2 undefined");
        return f64::NAN;
    }
    1.0 - ss_res / ss_tot
}

/// Fit the accuracy regressor: repeated grouped 80/20 splits for the r^2
/// distribution and averaged importances, then a final fit on all records.
pub fn train_regressor(
    records: &[PerformanceRecord],
    target: MetricKind,
    repeats: usize,
    seed: u64,
) -> Result<PerformanceRegressor> {
    let complete: Vec<PerformanceRecord> = records
        .iter()
        .filter(|r| r.is_complete())
        .cloned()
        .collect();
    if complete.is_empty() {
        return Err(Error::Degenerate("no complete records".into()));
    }
    let targets_all: Vec<f64> = complete
        .iter()
        .map(|r| r.best_over(target, &ALGORITHM_ORDER).1)
        .collect();

    let mut r2_runs = Vec::with_capacity(repeats);
    let mut importance_acc = vec![0.0; 6];
    for rep in 0..repeats {
        let (train, test) = grouped_split(&complete, 0.2, derive_seed(seed, rep as u64 + 1))?;
        let x_train = profile_matrix(&complete, &train);
        let y_train: Vec<f64> = train.iter().map(|&i| targets_all[i]).collect();
        let forest = Forest::fit(
            &x_train,
            &y_train,
            REGRESSOR_FOREST,
            derive_seed(seed, 1000 + rep as u64),
        );
        let x_test = profile_matrix(&complete, &test);
        let preds: Vec<f64> = (0..x_test.n_rows())
            .map(|r| forest.predict_row(x_test.row(r)))
            .collect();
        let truth: Vec<f64> = test.iter().map(|&i| targets_all[i]).collect();
        r2_runs.push(r_squared(&truth, &preds));
        for (acc, v) in importance_acc.iter_mut().zip(forest.feature_importances()) {
            *acc += v;
        }
    }
    let total: f64 = importance_acc.iter().sum();
    let importances: Vec<f64> = if total > 0.0 {
        importance_acc.iter().map(|v| v / total).collect()
    } else {
        importance_acc
    };

    let all_idx: Vec<usize> = (0..complete.len()).collect();
    let forest = Forest::fit(
        &profile_matrix(&complete, &all_idx),
        &targets_all,
        REGRESSOR_FOREST,
        derive_seed(seed, 999_999),
    );

    Ok(PerformanceRegressor {
        target,
        schema: META_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        forest,
        importances,
        r2_runs,
    })
}

impl PerformanceRegressor {
    pub fn predict(&self, profile: &NetworkProfile<f64>) -> f64 {
        self.forest.predict_row(&profile.as_row())
    }

    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn mean_r2(&self) -> f64 {
        let finite: Vec<f64> = self.r2_runs.iter().copied().filter(|v| v.is_finite()).collect();
        if finite.is_empty() {
            f64::NAN
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        }
    }
}

/// Averaged Gini importances ranked descending.
pub fn gini_importances(model: &PerformanceRegressor) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = model
        .schema
        .iter()
        .cloned()
        .zip(model.importances.iter().copied())
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

/// Which label space the meta classifier predicts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetaMode {
    /// Choose among all six algorithms.
    Full,
    /// Choose between RF stacking and SAGE only.
    Restricted,
}

impl MetaMode {
    pub fn algorithm_set(&self) -> &'static [AlgorithmId] {
        match self {
            MetaMode::Full => &ALGORITHM_ORDER,
            MetaMode::Restricted => &[AlgorithmId::Rf, AlgorithmId::Sage],
        }
    }
}

/// Hyperparameter grid for the meta classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGrid {
    pub max_depth: Vec<usize>,
    pub n_estimators: Vec<usize>,
    pub subsample: Vec<f64>,
    pub colsample_bytree: Vec<f64>,
    pub cv_folds: usize,
}

impl Default for MetaGrid {
    fn default() -> Self {
        MetaGrid {
            max_depth: vec![3, 6, 9],
            n_estimators: vec![50, 100, 200],
            subsample: vec![0.8, 1.0],
            colsample_bytree: vec![0.8, 1.0],
            cv_folds: 3,
        }
    }
}

/// Boosted-tree best-algorithm classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaClassifier {
    pub mode: MetaMode,
    pub metric: MetricKind,
    pub schema: Vec<String>,
    pub chosen: BoostParams,
    /// Classes in prediction-index order (the mode's algorithm set).
    classes: Vec<AlgorithmId>,
    model: Option<MultiClassBoost<f64>>,
    /// Set when training saw a single class.
    constant_class: Option<AlgorithmId>,
    pub cv_accuracy: f64,
}

fn labels_for(
    records: &[PerformanceRecord],
    metric: MetricKind,
    set: &[AlgorithmId],
) -> Vec<usize> {
    records
        .iter()
        .map(|r| {
            let best = oracle_select(r, metric, set);
            set.iter().position(|&a| a == best).expect("label in set")
        })
        .collect()
}

fn plain_folds(n: usize, labels: &[usize], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    // stratified by class label, dealt round-robin
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        by_class.entry(labels[i]).or_default().push(i);
    }
    let mut r = rng::rng_from_seed(seed);
    let mut out = vec![Vec::new(); folds];
    for rows in by_class.values_mut() {
        rng::shuffle(&mut r, rows);
        for (i, &row) in rows.iter().enumerate() {
            out[i % folds].push(row);
        }
    }
    out
}

/// Train the best-algorithm classifier with grid search and k-fold CV on
/// accuracy. A single-class label set yields a constant classifier.
pub fn train_meta_classifier(
    records: &[PerformanceRecord],
    mode: MetaMode,
    metric: MetricKind,
    grid: &MetaGrid,
    seed: u64,
) -> Result<MetaClassifier> {
    let complete: Vec<PerformanceRecord> = records
        .iter()
        .filter(|r| r.is_complete())
        .cloned()
        .collect();
    if complete.is_empty() {
        return Err(Error::Degenerate("no complete records".into()));
    }
    let set = mode.algorithm_set();
    let labels = labels_for(&complete, metric, set);
    let schema: Vec<String> = META_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();

    let distinct: std::collections::HashSet<usize> = labels.iter().copied().collect();
    if distinct.len() == 1 {
        let only = set[*distinct.iter().next().unwrap()];
        log::warn!(
            "meta labels are all {}; returning a constant classifier",
            only.name()
        );
        return Ok(MetaClassifier {
            mode,
            metric,
            schema,
            chosen: BoostParams::default(),
            classes: set.to_vec(),
            model: None,
            constant_class: Some(only),
            cv_accuracy: 1.0,
        });
    }

    let all_idx: Vec<usize> = (0..complete.len()).collect();
    let x_all = profile_matrix(&complete, &all_idx);
    let folds = plain_folds(
        complete.len(),
        &labels,
        grid.cv_folds,
        derive_seed(seed, 71),
    );

    // row-major cell order: depth, estimators, subsample, colsample
    let mut best: Option<(f64, BoostParams)> = None;
    for &depth in &grid.max_depth {
        for &n_est in &grid.n_estimators {
            for &sub in &grid.subsample {
                for &col in &grid.colsample_bytree {
                    let params = BoostParams {
                        n_estimators: n_est,
                        max_depth: depth,
                        subsample: sub,
                        colsample_bytree: col,
                        ..BoostParams::default()
                    };
                    let mut correct = 0usize;
                    let mut total = 0usize;
                    for (fi, val_idx) in folds.iter().enumerate() {
                        let val_set: std::collections::HashSet<usize> =
                            val_idx.iter().copied().collect();
                        let train_idx: Vec<usize> = (0..complete.len())
                            .filter(|i| !val_set.contains(i))
                            .collect();
                        let x_train = profile_matrix(&complete, &train_idx);
                        let y_train: Vec<usize> =
                            train_idx.iter().map(|&i| labels[i]).collect();
                        let model = MultiClassBoost::fit(
                            &x_train,
                            &y_train,
                            set.len(),
                            params,
                            derive_seed(seed, 500 + fi as u64),
                        );
                        for &i in val_idx {
                            if model.predict_row(x_all.row(i)) == labels[i] {
                                correct += 1;
                            }
                            total += 1;
                        }
                    }
                    let acc = correct as f64 / total as f64;
                    let better = match &best {
                        None => true,
                        Some((b, _)) => acc > *b + 1e-15,
                    };
                    if better {
                        best = Some((acc, params));
                    }
                }
            }
        }
    }
    let (cv_accuracy, chosen) = best.expect("nonempty grid");
    let model = MultiClassBoost::fit(
        &x_all,
        &labels,
        set.len(),
        chosen,
        derive_seed(seed, 900_000),
    );

    Ok(MetaClassifier {
        mode,
        metric,
        schema,
        chosen,
        classes: set.to_vec(),
        model: Some(model),
        constant_class: None,
        cv_accuracy,
    })
}

impl MetaClassifier {
    pub fn predict(&self, profile: &NetworkProfile<f64>) -> AlgorithmId {
        if let Some(c) = self.constant_class {
            return c;
        }
        let idx = self
            .model
            .as_ref()
            .expect("fitted model")
            .predict_row(&profile.as_row());
        self.classes[idx]
    }

    /// Highest-scoring class outside the excluded set (cost-aware CLI
    /// selection); falls back to fixed order for constant classifiers.
    pub fn predict_excluding(
        &self,
        profile: &NetworkProfile<f64>,
        exclude: &[AlgorithmId],
    ) -> Result<AlgorithmId> {
        let allowed: Vec<usize> = (0..self.classes.len())
            .filter(|&i| !exclude.contains(&self.classes[i]))
            .collect();
        if allowed.is_empty() {
            return Err(Error::InvalidArgument(
                "every candidate algorithm is excluded".into(),
            ));
        }
        if self.constant_class.is_some() {
            return Ok(self.classes[allowed[0]]);
        }
        let scores = self
            .model
            .as_ref()
            .expect("fitted model")
            .class_scores(&profile.as_row());
        let mut best = allowed[0];
        for &i in &allowed {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        Ok(self.classes[best])
    }
}

/// Pick an algorithm and predict its accuracy from structure alone.
pub fn select_algorithm(
    profile: &NetworkProfile<f64>,
    classifier: &MetaClassifier,
    regressor: &PerformanceRegressor,
) -> Result<(AlgorithmId, f64)> {
    if classifier.schema != regressor.schema
        || classifier.schema
            != META_FEATURE_NAMES
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
    {
        return Err(Error::SchemaMismatch {
            expected: META_FEATURE_NAMES.join(","),
            found: classifier.schema.join(","),
        });
    }
    Ok((classifier.predict(profile), regressor.predict(profile)))
}

/// Bundled meta models for one metric, ready to serialize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaBundle {
    pub classifier_full: MetaClassifier,
    pub classifier_restricted: MetaClassifier,
    pub regressor: PerformanceRegressor,
}

impl MetaBundle {
    pub fn to_json(&self) -> Result<String> {
        let wrapper = serde_json::json!({
            "schema": META_SCHEMA_VERSION,
            "bundle": self,
        });
        Ok(serde_json::to_string(&wrapper)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("schema").and_then(|s| s.as_str()) != Some(META_SCHEMA_VERSION) {
            return Err(Error::Format("unsupported meta container".into()));
        }
        Ok(serde_json::from_value(
            v.get("bundle")
                .cloned()
                .ok_or_else(|| Error::Format("missing bundle body".into()))?,
        )?)
    }

    pub fn digest(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        hasher.update(self.to_json()?.as_bytes());
        Ok(format!("{:x}", hasher.finalize()))
    }
}

/// Meta-dataset CSV: one row per (network, variant) holding the six profile
/// columns plus auc and topk for each algorithm.
pub fn write_records_csv<W: std::io::Write>(
    records: &[PerformanceRecord],
    w: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["network_id".to_string(), "variant_seed".to_string()];
    header.extend(META_FEATURE_NAMES.iter().map(|s| s.to_string()));
    for a in ALGORITHM_ORDER {
        header.push(format!("auc_{}", a.name().to_ascii_lowercase()));
    }
    for a in ALGORITHM_ORDER {
        header.push(format!("topk_{}", a.name().to_ascii_lowercase()));
    }
    wtr.write_record(&header)?;
    for r in records {
        let mut row = vec![r.network_id.clone(), r.variant_seed.to_string()];
        row.extend(r.profile.as_row().iter().map(|v| v.to_string()));
        for a in ALGORITHM_ORDER {
            row.push(
                r.metrics
                    .get(&a)
                    .map(|m| m.auc.to_string())
                    .unwrap_or_default(),
            );
        }
        for a in ALGORITHM_ORDER {
            row.push(
                r.metrics
                    .get(&a)
                    .map(|m| m.topk.to_string())
                    .unwrap_or_default(),
            );
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records_csv<R: std::io::Read>(r: R) -> Result<Vec<PerformanceRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        if row.len() != 2 + 6 + 12 {
            return Err(Error::Format(format!(
                "meta csv row has {} fields, expected 20",
                row.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Format(format!("bad number {s}: {e}")))
        };
        let profile = NetworkProfile {
            mean_local_clustering: parse(&row[2])?,
            mean_geodesic: parse(&row[3])?,
            degree_assortativity: parse(&row[4])?,
            node_count: parse(&row[5])?,
            mean_degree: parse(&row[6])?,
            degree_variance: parse(&row[7])?,
        };
        let mut metrics = BTreeMap::new();
        for (k, a) in ALGORITHM_ORDER.iter().enumerate() {
            let auc_s = &row[8 + k];
            let topk_s = &row[14 + k];
            if auc_s.is_empty() || topk_s.is_empty() {
                continue;
            }
            metrics.insert(
                *a,
                AlgoMetrics {
                    auc: parse(auc_s)?,
                    topk: parse(topk_s)?,
                },
            );
        }
        out.push(PerformanceRecord {
            network_id: row[0].to_string(),
            variant_seed: row[1]
                .parse()
                .map_err(|e| Error::Format(format!("bad seed: {e}")))?,
            profile,
            metrics,
        });
    }
    Ok(out)
}
