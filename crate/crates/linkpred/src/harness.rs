//! Run orchestration: configuration, the benchmark loop, persistence,
//! report generation, and structure-only algorithm selection.
//!
//! A run is fully described by its [`RunConfig`]; the serialized manifest
//! replays bit-identically (timings excluded from the replay contract).
//! Outputs land under `<output_dir>/run-<manifest-hash>/`.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval;
use crate::gnn::{self, GnnArchitecture, GnnConfig, TrainOptions};
use crate::graph::Graph;
use crate::meta::{
    self, AlgoMetrics, AlgorithmId, MetaBundle, MetaGrid, MetricKind, NetworkProfile,
    PerformanceRecord, ALGORITHM_ORDER,
};
use crate::predictors::{build_feature_matrix, FeatureMatrix};
use crate::rng::derive_seed;
use crate::smote::smote_balance;
use crate::split::{self, CandidatePairSet, NestedSplit};
use crate::stacking::{self, HyperGrid, StackerKind, TrainedStacker};

/// Ledger format tag, first line of every results CSV.
pub const LEDGER_SCHEMA_VERSION: &str = "linkpred.ledger/1";
/// Manifest format tag.
pub const MANIFEST_SCHEMA_VERSION: &str = "linkpred.manifest/1";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable supplying the default worker count.
pub const THREADS_ENV: &str = "LINKPRED_THREADS";

/// Everything a benchmark run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Edge-list files, one network each.
    pub inputs: Vec<PathBuf>,
    /// Optional sidecar index mapping file stem to domain tag.
    pub domain_index: Option<PathBuf>,
    /// Domain tag applied when the index has no entry.
    pub default_domain: String,
    pub alpha: f64,
    pub variants: usize,
    pub algorithms: Vec<AlgorithmId>,
    pub seed: u64,
    /// Override the missing-link budget rule when set.
    pub k_override: Option<usize>,
    /// Cap on sampled negative pairs for training and evaluation.
    pub negative_cap: usize,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses the environment default.
    pub threads: usize,
    /// Record wall-clock training times. Off gives byte-identical ledgers.
    pub record_timing: bool,
    pub cv_folds: usize,
    pub gnn_epochs: usize,
    pub gnn_num_layers_grid: Vec<usize>,
    pub gnn_hidden_grid: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        RunConfig {
            inputs: Vec::new(),
            domain_index: None,
            default_domain: "unknown".into(),
            alpha: 0.8,
            variants: 10,
            algorithms: ALGORITHM_ORDER.to_vec(),
            seed: 1,
            k_override: None,
            negative_cap: 10_000,
            output_dir: PathBuf::from("runs"),
            threads,
            record_timing: true,
            cv_folds: 5,
            gnn_epochs: 200,
            gnn_num_layers_grid: vec![2, 3, 4],
            gnn_hidden_grid: vec![32, 64, 128],
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Format(format!("config: {e}")))
    }

    /// Hash of the config snapshot; names the run directory.
    pub fn manifest_hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        Ok(format!("{:x}", h.finalize())[..16].to_string())
    }
}

/// Snapshot sufficient to reproduce every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub config: RunConfig,
    /// Digests of run outputs; the ledger digest ignores timing values.
    pub artifact_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn from_json(s: &str) -> Result<Self> {
        let m: RunManifest = serde_json::from_str(s)?;
        if m.schema != MANIFEST_SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "unsupported manifest schema {}",
                m.schema
            )));
        }
        Ok(m)
    }
}

/// One benchmark ledger row; error rows carry empty metric fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub network: String,
    pub domain: String,
    pub algorithm: String,
    pub variant: usize,
    pub variant_seed: u64,
    pub auc: Option<f64>,
    pub topk: Option<f64>,
    pub k: Option<usize>,
    pub train_time_s: Option<f64>,
    pub status: String,
    pub error: String,
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Domain sidecar: CSV lines `file_stem,domain` (comments with '#').
pub fn read_domain_index(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (stem, domain) = line.split_once(',').ok_or_else(|| {
            Error::Format(format!("domain index line missing comma: {line}"))
        })?;
        out.insert(stem.trim().to_string(), domain.trim().to_string());
    }
    Ok(out)
}

fn network_id_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

struct EvalCandidates {
    positives: Vec<(usize, usize)>,
    negatives: Vec<(usize, usize)>,
}

/// Evaluation candidate set for one variant: the held-out edges plus up to
/// `cap` sampled true non-edges of the ground truth (never edges of G or
/// of G').
fn eval_candidates(
    nested: &NestedSplit,
    cap: usize,
    seed: u64,
) -> Result<EvalCandidates> {
    let positives = nested.outer_positives().to_vec();
    let negatives = split::sample_negatives_excluding(
        nested.observed_graph(),
        cap,
        seed,
        &positives,
    )?;
    Ok(EvalCandidates {
        positives,
        negatives: negatives.pairs,
    })
}

/// Train one stacking algorithm for one variant and evaluate it.
///
/// The reported training time covers predictor extraction for the training
/// table, SMOTE balancing, grid-search tuning and the final refit; the
/// extraction cost is charged to each algorithm as it would be paid if the
/// algorithm ran standalone.
fn run_stacker_variant(
    algo: StackerKind,
    nested: &NestedSplit,
    candidates: &EvalCandidates,
    config: &RunConfig,
    task_seed: u64,
) -> Result<(f64, f64, usize, f64)> {
    let g_train = nested.training_graph();
    let g_obs = nested.observed_graph();

    let (outcome, train_time) =
        eval::time_training(|| -> Result<(TrainedStacker<f64>, FeatureMatrix<f64>)> {
            let train_neg = split::sample_negatives_excluding(
                g_obs,
                config.negative_cap,
                derive_seed(task_seed, 1),
                nested.inner_positives(),
            )?;
            let positives = CandidatePairSet::positives(nested.inner_positives());
            let matrix = build_feature_matrix::<f64>(g_train, &positives, &train_neg)?;
            let balanced = smote_balance(&matrix, derive_seed(task_seed, 2))?;
            let model = stacking::train_stacker(
                algo,
                &balanced,
                &HyperGrid::default(),
                config.cv_folds,
                derive_seed(task_seed, 3),
            )?;
            // evaluation features on the observed network
            let eval_pos = CandidatePairSet::positives(&candidates.positives);
            let eval_neg = CandidatePairSet::negatives(&candidates.negatives);
            let eval_matrix = build_feature_matrix::<f64>(g_obs, &eval_pos, &eval_neg)?;
            Ok((model, eval_matrix))
        });
    let (model, eval_matrix) = outcome?;

    let scores = model.predict_scores(&eval_matrix)?;
    score_candidates(&scores, candidates, config, train_time)
}

/// Tune, retrain and evaluate one GNN architecture for one variant.
fn run_gnn_variant(
    arch: GnnArchitecture,
    nested: &NestedSplit,
    candidates: &EvalCandidates,
    config: &RunConfig,
    task_seed: u64,
) -> Result<(f64, f64, usize, f64)> {
    let g_obs = nested.observed_graph();
    let (model, train_time): (Result<gnn::GnnModel<f64>>, f64) = eval::time_training(|| {
        let (best, _) = gnn::tune_gnn(
            nested,
            arch,
            &config.gnn_num_layers_grid,
            &config.gnn_hidden_grid,
            config.gnn_epochs,
            config.negative_cap,
            derive_seed(task_seed, 4),
        )?;
        let retrain = GnnConfig {
            seed: derive_seed(task_seed, 5),
            ..best
        };
        let (model, _) = gnn::train_gnn(g_obs, retrain, &TrainOptions::default())?;
        Ok(model)
    });
    let model = model?;
    let emb = model.embed(g_obs);
    let mut scores = model.score_with_embeddings(&emb, &candidates.positives);
    scores.extend(model.score_with_embeddings(&emb, &candidates.negatives));
    score_candidates(&scores, candidates, config, train_time)
}

/// AUC and Top-k from candidate scores ordered positives-then-negatives.
fn score_candidates(
    scores: &[f64],
    candidates: &EvalCandidates,
    config: &RunConfig,
    train_time: f64,
) -> Result<(f64, f64, usize, f64)> {
    let np = candidates.positives.len();
    let pos = &scores[..np];
    let neg = &scores[np..];
    let auc = eval::auc(pos, neg)?;
    let k = config.k_override.unwrap_or_else(|| eval::choose_k(np));
    let scored: Vec<((usize, usize), f64)> = candidates
        .positives
        .iter()
        .chain(&candidates.negatives)
        .copied()
        .zip(scores.iter().copied())
        .collect();
    let topk = eval::topk(&scored, &candidates.positives, k)?;
    Ok((auc, topk, k, train_time))
}

/// Outputs of one benchmark run.
#[derive(Debug, Clone)]
pub struct BenchmarkOutput {
    pub run_dir: PathBuf,
    pub ledger_path: PathBuf,
    pub records_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows: Vec<LedgerRow>,
}

/// Digest of ledger content with timing values masked, so reruns compare
/// equal regardless of wall-clock noise.
pub fn ledger_digest(text: &str) -> String {
    let mut h = Sha256::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("network,") {
            h.update(line.as_bytes());
        } else {
            let fields: Vec<&str> = line.split(',').collect();
            // train_time_s is the 9th column (index 8)
            for (i, f) in fields.iter().enumerate() {
                if i != 8 {
                    h.update(f.as_bytes());
                }
                h.update(b",");
            }
        }
        h.update(b"\n");
    }
    format!("{:x}", h.finalize())
}

fn write_ledger(path: &Path, rows: &[LedgerRow]) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("# {LEDGER_SCHEMA_VERSION}\n"));
    out.push_str("network,domain,algorithm,variant,variant_seed,auc,topk,k,train_time_s,status,error\n");
    for r in rows {
        let fmt_opt = |v: &Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.network,
            r.domain,
            r.algorithm,
            r.variant,
            r.variant_seed,
            fmt_opt(&r.auc),
            fmt_opt(&r.topk),
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_opt(&r.train_time_s),
            r.status,
            r.error.replace(',', ";"),
        ));
    }
    fs::write(path, &out)?;
    Ok(ledger_digest(&out))
}

/// Parse a ledger file back into rows.
pub fn read_ledger(path: &Path) -> Result<Vec<LedgerRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first.trim() == format!("# {LEDGER_SCHEMA_VERSION}") => {}
        other => {
            return Err(Error::Format(format!(
                "ledger schema line missing or unsupported: {other:?}"
            )))
        }
    }
    let _header = lines.next();
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::Format(format!("bad ledger row: {line}")));
        }
        let opt_f64 = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse().map_err(|e| {
                    Error::Format(format!("bad number {s}: {e}"))
                })?))
            }
        };
        rows.push(LedgerRow {
            network: f[0].into(),
            domain: f[1].into(),
            algorithm: f[2].into(),
            variant: f[3]
                .parse()
                .map_err(|e| Error::Format(format!("bad variant: {e}")))?,
            variant_seed: f[4]
                .parse()
                .map_err(|e| Error::Format(format!("bad seed: {e}")))?,
            auc: opt_f64(f[5])?,
            topk: opt_f64(f[6])?,
            k: if f[7].is_empty() {
                None
            } else {
                Some(
                    f[7].parse()
                        .map_err(|e| Error::Format(format!("bad k: {e}")))?,
                )
            },
            train_time_s: opt_f64(f[8])?,
            status: f[9].into(),
            error: f[10].into(),
        });
    }
    Ok(rows)
}

struct VariantOutcome {
    rows: Vec<LedgerRow>,
    record: Option<PerformanceRecord>,
}

fn run_variant(
    network_id: &str,
    domain: &str,
    graph: &Graph,
    variant: usize,
    config: &RunConfig,
) -> VariantOutcome {
    let network_seed = derive_seed(config.seed, fnv1a(network_id));
    let variant_seed = derive_seed(network_seed, variant as u64);
    let mut rows = Vec::new();

    let shared = catch_unwind(AssertUnwindSafe(|| -> Result<_> {
        let nested = split::nested_split(graph, config.alpha, variant_seed)?;
        let candidates =
            eval_candidates(&nested, config.negative_cap, derive_seed(variant_seed, 100))?;
        let profile: NetworkProfile<f64> = meta::network_profile(nested.observed_graph());
        Ok((nested, candidates, profile))
    }));

    let (nested, candidates, profile) = match shared {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => {
            for algo in &config.algorithms {
                rows.push(error_row(network_id, domain, algo.name(), variant, variant_seed, &e.to_string()));
            }
            return VariantOutcome { rows, record: None };
        }
        Err(_) => {
            for algo in &config.algorithms {
                rows.push(error_row(network_id, domain, algo.name(), variant, variant_seed, "panic in split stage"));
            }
            return VariantOutcome { rows, record: None };
        }
    };

    let mut metrics: BTreeMap<AlgorithmId, AlgoMetrics> = BTreeMap::new();
    for &algo in &config.algorithms {
        let task_seed = derive_seed(variant_seed, 1000 + algo as u64);
        let outcome = catch_unwind(AssertUnwindSafe(|| match algo {
            AlgorithmId::Rf => {
                run_stacker_variant(StackerKind::Rf, &nested, &candidates, config, task_seed)
            }
            AlgorithmId::Xgb => {
                run_stacker_variant(StackerKind::Xgb, &nested, &candidates, config, task_seed)
            }
            AlgorithmId::Lr => {
                run_stacker_variant(StackerKind::Lr, &nested, &candidates, config, task_seed)
            }
            AlgorithmId::Svm => {
                run_stacker_variant(StackerKind::Svm, &nested, &candidates, config, task_seed)
            }
            AlgorithmId::Gcn => {
                run_gnn_variant(GnnArchitecture::Gcn, &nested, &candidates, config, task_seed)
            }
            AlgorithmId::Sage => {
                run_gnn_variant(GnnArchitecture::Sage, &nested, &candidates, config, task_seed)
            }
        }));
        match outcome {
            Ok(Ok((auc, topk, k, time))) => {
                metrics.insert(algo, AlgoMetrics { auc, topk });
                rows.push(LedgerRow {
                    network: network_id.into(),
                    domain: domain.into(),
                    algorithm: algo.name().into(),
                    variant,
                    variant_seed,
                    auc: Some(auc),
                    topk: Some(topk),
                    k: Some(k),
                    train_time_s: Some(if config.record_timing { time } else { 0.0 }),
                    status: "ok".into(),
                    error: String::new(),
                });
            }
            Ok(Err(e)) => rows.push(error_row(
                network_id,
                domain,
                algo.name(),
                variant,
                variant_seed,
                &e.to_string(),
            )),
            Err(_) => rows.push(error_row(
                network_id,
                domain,
                algo.name(),
                variant,
                variant_seed,
                "panic in training task",
            )),
        }
    }

    let record = PerformanceRecord {
        network_id: network_id.into(),
        variant_seed,
        profile,
        metrics,
    };
    VariantOutcome {
        rows,
        record: Some(record),
    }
}

fn error_row(
    network: &str,
    domain: &str,
    algorithm: &str,
    variant: usize,
    variant_seed: u64,
    message: &str,
) -> LedgerRow {
    LedgerRow {
        network: network.into(),
        domain: domain.into(),
        algorithm: algorithm.into(),
        variant,
        variant_seed,
        auc: None,
        topk: None,
        k: None,
        train_time_s: None,
        status: "error".into(),
        error: message.into(),
    }
}

/// Execute the full benchmark described by `config`.
///
/// Failures are isolated per (network, variant, algorithm) task as error
/// rows; row order is independent of the worker count.
pub fn cmd_benchmark(config: &RunConfig) -> Result<BenchmarkOutput> {
    if config.inputs.is_empty() {
        return Err(Error::InvalidArgument("no input networks".into()));
    }
    let domains = match &config.domain_index {
        Some(p) => read_domain_index(p)?,
        None => BTreeMap::new(),
    };
    let hash = config.manifest_hash()?;
    let run_dir = config.output_dir.join(format!("run-{hash}"));
    fs::create_dir_all(&run_dir)?;

    // parse inputs up front; unreadable files become error rows
    let mut networks: Vec<(String, String, Option<Graph>, String)> = Vec::new();
    for path in &config.inputs {
        let id = network_id_of(path);
        let domain = domains
            .get(&id)
            .cloned()
            .unwrap_or_else(|| config.default_domain.clone());
        match fs::read_to_string(path)
            .map_err(Error::from)
            .and_then(|text| Graph::parse_edge_list(&text))
        {
            Ok((g, stats)) => {
                if stats.duplicate_edges + stats.self_loops > 0 {
                    log::info!(
                        "{id}: dropped {} duplicate edges, {} self-loops",
                        stats.duplicate_edges,
                        stats.self_loops
                    );
                }
                networks.push((id, domain, Some(g), String::new()));
            }
            Err(e) => networks.push((id, domain, None, e.to_string())),
        }
    }

    let tasks: Vec<(usize, usize)> = (0..networks.len())
        .flat_map(|n| (0..config.variants).map(move |v| (n, v)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcomes: Vec<VariantOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(n, v)| {
                let (id, domain, graph, err) = &networks[n];
                match graph {
                    Some(g) => run_variant(id, domain, g, v, config),
                    None => VariantOutcome {
                        rows: config
                            .algorithms
                            .iter()
                            .map(|a| error_row(id, domain, a.name(), v, 0, err))
                            .collect(),
                        record: None,
                    },
                }
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut records = Vec::new();
    for o in outcomes {
        rows.extend(o.rows);
        if let Some(r) = o.record {
            records.push(r);
        }
    }

    let ledger_path = run_dir.join("ledger.csv");
    let ledger_digest = write_ledger(&ledger_path, &rows)?;

    let records_path = run_dir.join("records.csv");
    {
        let f = fs::File::create(&records_path)?;
        meta::write_records_csv(&records, f)?;
    }
    let records_digest = {
        let mut h = Sha256::new();
        h.update(fs::read(&records_path)?);
        format!("{:x}", h.finalize())
    };

    let mut artifact_digests = BTreeMap::new();
    artifact_digests.insert("ledger.csv".to_string(), ledger_digest);
    artifact_digests.insert("records.csv".to_string(), records_digest);
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA_VERSION.into(),
        tool_version: TOOL_VERSION.into(),
        config: config.clone(),
        artifact_digests,
    };
    let manifest_path = run_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    Ok(BenchmarkOutput {
        run_dir,
        ledger_path,
        records_path,
        manifest_path,
        rows,
    })
}

/// Per-domain mean and spread of one algorithm under one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryCell {
    pub domain: String,
    pub algorithm: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub networks: usize,
    /// Statistically indistinguishable from the column best (Welch test).
    pub top_group: bool,
}

/// Best / nearly-best rates of one algorithm under one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCell {
    pub algorithm: String,
    pub metric: String,
    pub best_rate: f64,
    pub nearly_best_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Vec<SummaryCell>,
    pub rates: Vec<RateCell>,
}

/// Relative margin below the best accuracy that still counts as
/// nearly-best.
pub const NEARLY_BEST_MARGIN: f64 = 0.03;

/// Aggregate a ledger into summary tables and best / nearly-best rates.
pub fn cmd_report(rows: &[LedgerRow], margin: f64) -> Result<Report> {
    let ok_rows: Vec<&LedgerRow> = rows.iter().filter(|r| r.status == "ok").collect();
    if ok_rows.is_empty() {
        return Err(Error::Degenerate("ledger has no successful rows".into()));
    }

    // network-level value: mean over variants, per algorithm and metric
    type Key = (String, String, String); // domain, network, algorithm
    let mut by_network: BTreeMap<Key, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in &ok_rows {
        let e = by_network
            .entry((r.domain.clone(), r.network.clone(), r.algorithm.clone()))
            .or_default();
        e.0.push(r.auc.unwrap_or(0.0));
        e.1.push(r.topk.unwrap_or(0.0));
    }
    let network_value: BTreeMap<Key, (f64, f64)> = by_network
        .iter()
        .map(|(k, (aucs, topks))| {
            (
                k.clone(),
                (
                    aucs.iter().sum::<f64>() / aucs.len() as f64,
                    topks.iter().sum::<f64>() / topks.len() as f64,
                ),
            )
        })
        .collect();

    let mut algorithms: Vec<String> = network_value.keys().map(|k| k.2.clone()).collect();
    algorithms.sort();
    algorithms.dedup();
    let mut domains: Vec<String> = network_value.keys().map(|k| k.0.clone()).collect();
    domains.sort();
    domains.dedup();

    let mut summary = Vec::new();
    for metric_idx in 0..2 {
        let metric = if metric_idx == 0 { "auc" } else { "topk" };
        let mut scopes: Vec<String> = vec!["all".to_string()];
        scopes.extend(domains.iter().cloned());
        for scope in scopes {
            // per-algorithm list of network values in this scope
            let mut per_algo: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for (k, v) in &network_value {
                if scope == "all" || k.0 == scope {
                    let value = if metric_idx == 0 { v.0 } else { v.1 };
                    per_algo.entry(k.2.as_str()).or_default().push(value);
                }
            }
            if per_algo.is_empty() {
                continue;
            }
            let best_algo = per_algo
                .iter()
                .max_by(|a, b| {
                    let ma = a.1.iter().sum::<f64>() / a.1.len() as f64;
                    let mb = b.1.iter().sum::<f64>() / b.1.len() as f64;
                    ma.partial_cmp(&mb).unwrap()
                })
                .map(|(k, _)| k.to_string())
                .unwrap();
            let best_values = per_algo[best_algo.as_str()].clone();
            for (algo, values) in &per_algo {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let std = crate::scalar::sample_variance(values).sqrt();
                let top_group = if *algo == best_algo {
                    true
                } else if values.len() >= 2 && best_values.len() >= 2 {
                    eval::welch_ttest(values, &best_values)
                        .map(|p| p > 0.05)
                        .unwrap_or(false)
                } else {
                    false
                };
                summary.push(SummaryCell {
                    domain: scope.clone(),
                    algorithm: algo.to_string(),
                    metric: metric.to_string(),
                    mean,
                    std,
                    networks: values.len(),
                    top_group,
                });
            }
        }
    }

    // best / nearly-best per network
    let mut rates = Vec::new();
    let mut networks: Vec<(String, String)> = network_value
        .keys()
        .map(|k| (k.0.clone(), k.1.clone()))
        .collect();
    networks.sort();
    networks.dedup();
    for metric_idx in 0..2 {
        let metric = if metric_idx == 0 { "auc" } else { "topk" };
        let mut best_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut nearly_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut counted_networks = 0usize;
        for (domain, network) in &networks {
            let mut entries: Vec<(&str, f64)> = Vec::new();
            for algo in &algorithms {
                if let Some(v) =
                    network_value.get(&(domain.clone(), network.clone(), algo.clone()))
                {
                    entries.push((algo.as_str(), if metric_idx == 0 { v.0 } else { v.1 }));
                }
            }
            if entries.is_empty() {
                continue;
            }
            counted_networks += 1;
            let best = entries
                .iter()
                .cloned()
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(a.0)))
                .unwrap();
            *best_count.entry(best.0).or_default() += 1;
            for (algo, v) in &entries {
                if *algo != best.0 && *v >= best.1 * (1.0 - margin) {
                    *nearly_count.entry(algo).or_default() += 1;
                }
            }
        }
        for algo in &algorithms {
            rates.push(RateCell {
                algorithm: algo.clone(),
                metric: metric.to_string(),
                best_rate: *best_count.get(algo.as_str()).unwrap_or(&0) as f64
                    / counted_networks as f64,
                nearly_best_rate: *nearly_count.get(algo.as_str()).unwrap_or(&0) as f64
                    / counted_networks as f64,
            });
        }
    }

    Ok(Report { summary, rates })
}

impl Report {
    /// Human-readable tables; `*` marks the statistically-best group.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for metric in ["auc", "topk"] {
            out.push_str(&format!("== {} (mean +/- std by domain) ==\n", metric));
            let mut domains: Vec<&str> = self
                .summary
                .iter()
                .filter(|c| c.metric == metric)
                .map(|c| c.domain.as_str())
                .collect();
            domains.sort();
            domains.dedup();
            for d in domains {
                out.push_str(&format!("[{d}]\n"));
                for c in self
                    .summary
                    .iter()
                    .filter(|c| c.metric == metric && c.domain == d)
                {
                    out.push_str(&format!(
                        "  {:<5} {:.3} ({:.3}) over {} networks{}\n",
                        c.algorithm,
                        c.mean,
                        c.std,
                        c.networks,
                        if c.top_group { " *" } else { "" }
                    ));
                }
            }
            out.push_str(&format!("== {} best / nearly-best rates ==\n", metric));
            for c in self.rates.iter().filter(|c| c.metric == metric) {
                out.push_str(&format!(
                    "  {:<5} best {:.1}%  nearly-best {:.1}%  total {:.1}%\n",
                    c.algorithm,
                    100.0 * c.best_rate,
                    100.0 * c.nearly_best_rate,
                    100.0 * (c.best_rate + c.nearly_best_rate),
                ));
            }
        }
        out
    }

    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let mut s = String::from("domain,algorithm,metric,mean,std,networks,top_group\n");
        for c in &self.summary {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.domain, c.algorithm, c.metric, c.mean, c.std, c.networks, c.top_group
            ));
        }
        fs::write(dir.join("summary.csv"), s)?;
        let mut s = String::from("algorithm,metric,best_rate,nearly_best_rate\n");
        for c in &self.rates {
            s.push_str(&format!(
                "{},{},{},{}\n",
                c.algorithm, c.metric, c.best_rate, c.nearly_best_rate
            ));
        }
        fs::write(dir.join("rates.csv"), s)?;
        Ok(())
    }
}

/// Train the meta models (both metrics) from a records CSV and store them.
pub fn cmd_meta_train(
    records_path: &Path,
    out_dir: &Path,
    repeats: usize,
    seed: u64,
) -> Result<(PathBuf, PathBuf)> {
    let f = fs::File::open(records_path)?;
    let records = meta::read_records_csv(f)?;
    let complete: Vec<_> = records.iter().filter(|r| r.is_complete()).collect();
    log::info!(
        "meta-train: {} records, {} complete",
        records.len(),
        complete.len()
    );
    fs::create_dir_all(out_dir)?;
    let grid = MetaGrid::default();
    let mut paths = Vec::new();
    for metric in [MetricKind::Auc, MetricKind::Topk] {
        let bundle = MetaBundle {
            classifier_full: meta::train_meta_classifier(
                &records,
                meta::MetaMode::Full,
                metric,
                &grid,
                derive_seed(seed, 1),
            )?,
            classifier_restricted: meta::train_meta_classifier(
                &records,
                meta::MetaMode::Restricted,
                metric,
                &grid,
                derive_seed(seed, 2),
            )?,
            regressor: meta::train_regressor(&records, metric, repeats, derive_seed(seed, 3))?,
        };
        let path = out_dir.join(format!("meta_{}.json", metric.name()));
        fs::write(&path, bundle.to_json()?)?;
        paths.push(path);
    }
    Ok((paths[0].clone(), paths[1].clone()))
}

/// Structure-only selection report, Tables 3-4 shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub network: String,
    pub nodes: usize,
    pub edges: usize,
    pub pred_model_auc: String,
    pub pred_auc: f64,
    pub pred_model_topk: String,
    pub pred_topk: f64,
}

impl SelectionReport {
    pub fn render_text(&self) -> String {
        format!(
            "network={} n={} m={}\npred_model_auc={}\npred_auc={:.4}\npred_model_topk={}\npred_topk={:.4}\n",
            self.network,
            self.nodes,
            self.edges,
            self.pred_model_auc,
            self.pred_auc,
            self.pred_model_topk,
            self.pred_topk
        )
    }
}

fn load_bundle(models_dir: &Path, metric: MetricKind) -> Result<MetaBundle> {
    let path = models_dir.join(format!("meta_{}.json", metric.name()));
    let text = fs::read_to_string(&path).map_err(|_| Error::MissingModel {
        path: path.display().to_string(),
        hint: "train meta models first with the meta-train command".into(),
    })?;
    MetaBundle::from_json(&text)
}

/// Pick the best algorithm for a graph without training any LP model.
pub fn cmd_select(
    graph_path: &Path,
    models_dir: &Path,
    restricted: bool,
    exclude: &[AlgorithmId],
) -> Result<SelectionReport> {
    let text = fs::read_to_string(graph_path)?;
    let (graph, _) = Graph::parse_edge_list(&text)?;
    let profile: NetworkProfile<f64> = meta::network_profile(&graph);

    let mut picks = Vec::new();
    for metric in [MetricKind::Auc, MetricKind::Topk] {
        let bundle = load_bundle(models_dir, metric)?;
        let classifier = if restricted {
            &bundle.classifier_restricted
        } else {
            &bundle.classifier_full
        };
        let (algo, value) = meta::select_algorithm(&profile, classifier, &bundle.regressor)?;
        let algo = if exclude.contains(&algo) {
            classifier.predict_excluding(&profile, exclude)?
        } else {
            algo
        };
        picks.push((algo, value));
    }

    Ok(SelectionReport {
        network: network_id_of(graph_path),
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        pred_model_auc: picks[0].0.name().into(),
        pred_auc: picks[0].1,
        pred_model_topk: picks[1].0.name().into(),
        pred_topk: picks[1].1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn write_random_graph(dir: &Path, name: &str, n: usize, m: usize, seed: u64) -> PathBuf {
        let mut r = rng::rng_from_seed(seed);
        let mut edges = std::collections::HashSet::new();
        while edges.len() < m {
            let a = rng::uniform_usize(&mut r, n);
            let b = rng::uniform_usize(&mut r, n);
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        edges.sort_unstable();
        let mut text = String::new();
        for (a, b) in edges {
            text.push_str(&format!("{a} {b}\n"));
        }
        let path = dir.join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn fast_config(dir: &Path, inputs: Vec<PathBuf>) -> RunConfig {
        RunConfig {
            inputs,
            default_domain: "test".into(),
            variants: 2,
            algorithms: vec![AlgorithmId::Rf, AlgorithmId::Lr],
            seed: 11,
            negative_cap: 120,
            output_dir: dir.join("runs"),
            threads: 2,
            record_timing: false,
            cv_folds: 3,
            gnn_epochs: 3,
            gnn_num_layers_grid: vec![2],
            gnn_hidden_grid: vec![4],
            ..RunConfig::default()
        }
    }

    #[test]
    fn benchmark_cartesian_row_count_and_rerun_digest() {
        let tmp = tempfile::tempdir().unwrap();
        let a = write_random_graph(tmp.path(), "neta.edges", 30, 70, 1);
        let b = write_random_graph(tmp.path(), "netb.edges", 30, 70, 2);
        let config = fast_config(tmp.path(), vec![a, b]);

        let out1 = cmd_benchmark(&config).unwrap();
        // 2 networks x 2 variants x 2 algorithms
        assert_eq!(out1.rows.len(), 8);
        assert!(out1.rows.iter().all(|r| r.status == "ok"));

        let text1 = fs::read_to_string(&out1.ledger_path).unwrap();
        let out2 = cmd_benchmark(&config).unwrap();
        let text2 = fs::read_to_string(&out2.ledger_path).unwrap();
        assert_eq!(ledger_digest(&text1), ledger_digest(&text2));
        // with timing recording off the files are byte-identical
        assert_eq!(text1, text2);
    }

    #[test]
    fn worker_count_does_not_change_ledger_bytes() {
        let tmp = tempfile::tempdir().unwrap();
        let a = write_random_graph(tmp.path(), "neta.edges", 25, 60, 3);
        let b = write_random_graph(tmp.path(), "netb.edges", 25, 60, 4);
        let mut config = fast_config(tmp.path(), vec![a, b]);
        config.algorithms = vec![AlgorithmId::Rf];

        config.threads = 1;
        config.output_dir = tmp.path().join("runs1");
        let serial = cmd_benchmark(&config).unwrap();
        config.threads = 4;
        config.output_dir = tmp.path().join("runs4");
        let parallel = cmd_benchmark(&config).unwrap();
        assert_eq!(
            fs::read(&serial.ledger_path).unwrap(),
            fs::read(&parallel.ledger_path).unwrap()
        );
    }

    #[test]
    fn corrupt_input_is_isolated() {
        let tmp = tempfile::tempdir().unwrap();
        let a = write_random_graph(tmp.path(), "good1.edges", 25, 55, 5);
        let bad = tmp.path().join("broken.edges");
        fs::write(&bad, "0 1\nnot-a-valid-line-with-three tokens here\n").unwrap();
        let c = write_random_graph(tmp.path(), "good2.edges", 25, 55, 6);
        let mut config = fast_config(tmp.path(), vec![a, bad, c]);
        config.algorithms = vec![AlgorithmId::Rf];
        let out = cmd_benchmark(&config).unwrap();
        let ok = out.rows.iter().filter(|r| r.status == "ok").count();
        let err = out.rows.iter().filter(|r| r.status == "error").count();
        assert_eq!(ok, 4); // 2 good networks x 2 variants
        assert_eq!(err, 2); // broken network x 2 variants
        assert!(out
            .rows
            .iter()
            .filter(|r| r.status == "error")
            .all(|r| r.network == "broken" && !r.error.is_empty()));
    }

    #[test]
    fn ledger_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let rows = vec![
            LedgerRow {
                network: "x".into(),
                domain: "social".into(),
                algorithm: "RF".into(),
                variant: 0,
                variant_seed: 7,
                auc: Some(0.9),
                topk: Some(0.5),
                k: Some(10),
                train_time_s: Some(1.25),
                status: "ok".into(),
                error: String::new(),
            },
            LedgerRow {
                network: "y".into(),
                domain: "bio".into(),
                algorithm: "SAGE".into(),
                variant: 1,
                variant_seed: 9,
                auc: None,
                topk: None,
                k: None,
                train_time_s: None,
                status: "error".into(),
                error: "boom, with a comma".into(),
            },
        ];
        let path = tmp.path().join("ledger.csv");
        write_ledger(&path, &rows).unwrap();
        let back = read_ledger(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].network, "x");
        assert_eq!(back[0].auc, Some(0.9));
        assert_eq!(back[1].status, "error");
    }

    fn hand_row(network: &str, algo: &str, auc: f64, topk: f64) -> LedgerRow {
        LedgerRow {
            network: network.into(),
            domain: "d".into(),
            algorithm: algo.into(),
            variant: 0,
            variant_seed: 0,
            auc: Some(auc),
            topk: Some(topk),
            k: Some(10),
            train_time_s: Some(0.0),
            status: "ok".into(),
            error: String::new(),
        }
    }

    #[test]
    fn report_single_algorithm_is_always_best() {
        let rows = vec![
            hand_row("a", "RF", 0.9, 0.5),
            hand_row("b", "RF", 0.8, 0.4),
        ];
        let report = cmd_report(&rows, NEARLY_BEST_MARGIN).unwrap();
        let rate = report
            .rates
            .iter()
            .find(|r| r.algorithm == "RF" && r.metric == "auc")
            .unwrap();
        assert_eq!(rate.best_rate, 1.0);
        assert_eq!(rate.nearly_best_rate, 0.0);
    }

    #[test]
    fn report_margin_counts_close_seconds() {
        // two algorithms within 3% of each other on every network
        let rows = vec![
            hand_row("a", "RF", 0.90, 0.5),
            hand_row("a", "XGB", 0.89, 0.5),
            hand_row("b", "RF", 0.85, 0.5),
            hand_row("b", "XGB", 0.86, 0.5),
        ];
        let report = cmd_report(&rows, NEARLY_BEST_MARGIN).unwrap();
        for algo in ["RF", "XGB"] {
            let rate = report
                .rates
                .iter()
                .find(|r| r.algorithm == algo && r.metric == "auc")
                .unwrap();
            assert!(
                (rate.best_rate + rate.nearly_best_rate - 1.0).abs() < 1e-12,
                "{algo} best {} nearly {}",
                rate.best_rate,
                rate.nearly_best_rate
            );
        }
    }

    #[test]
    fn report_means_match_hand_arithmetic() {
        let rows = vec![
            hand_row("a", "RF", 0.9, 0.3),
            hand_row("b", "RF", 0.8, 0.4),
            hand_row("c", "RF", 0.7, 0.5),
        ];
        let report = cmd_report(&rows, NEARLY_BEST_MARGIN).unwrap();
        let cell = report
            .summary
            .iter()
            .find(|c| c.domain == "all" && c.metric == "auc")
            .unwrap();
        assert!((cell.mean - 0.8).abs() < 1e-12);
        assert!((cell.std - 0.1).abs() < 1e-12);
        let cell = report
            .summary
            .iter()
            .find(|c| c.domain == "all" && c.metric == "topk")
            .unwrap();
        assert!((cell.mean - 0.4).abs() < 1e-12);
    }

    #[test]
    fn config_toml_and_manifest_round_trip() {
        let config = RunConfig {
            inputs: vec![PathBuf::from("x.edges")],
            ..RunConfig::default()
        };
        let toml_text = config.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&toml_text).unwrap();
        assert_eq!(config, back);
        assert_eq!(
            config.manifest_hash().unwrap(),
            back.manifest_hash().unwrap()
        );

        let manifest = RunManifest {
            schema: MANIFEST_SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            config,
            artifact_digests: BTreeMap::new(),
        };
        let json = serde_json::to_string(&manifest).unwrap();
        let back = RunManifest::from_json(&json).unwrap();
        assert_eq!(manifest, back);
    }

    #[test]
    fn select_pipeline_on_planted_models() {
        use crate::meta::{AlgoMetrics, PerformanceRecord};
        use std::collections::BTreeMap as Map;

        let tmp = tempfile::tempdir().unwrap();
        // planted records: RF best when mean degree < 4, else SAGE
        let mut r = rng::rng_from_seed(3);
        let mut records = Vec::new();
        for net in 0..20 {
            for v in 0..2 {
                let mean_degree = 1.0 + 7.0 * rng::uniform_f64(&mut r);
                let base = 0.6 + 0.04 * mean_degree;
                let best = if mean_degree < 4.0 {
                    AlgorithmId::Rf
                } else {
                    AlgorithmId::Sage
                };
                let mut metrics = Map::new();
                for a in ALGORITHM_ORDER {
                    let val = if a == best { base } else { base - 0.2 };
                    metrics.insert(a, AlgoMetrics { auc: val, topk: val });
                }
                records.push(PerformanceRecord {
                    network_id: format!("net{net}"),
                    variant_seed: v,
                    profile: crate::meta::NetworkProfile {
                        mean_local_clustering: rng::uniform_f64(&mut r),
                        mean_geodesic: 2.0,
                        degree_assortativity: 0.0,
                        node_count: 100.0,
                        mean_degree,
                        degree_variance: 1.0,
                    },
                    metrics,
                });
            }
        }
        let records_path = tmp.path().join("records.csv");
        {
            let f = fs::File::create(&records_path).unwrap();
            meta::write_records_csv(&records, f).unwrap();
        }
        let models_dir = tmp.path().join("models");
        cmd_meta_train(&records_path, &models_dir, 3, 5).unwrap();

        // a 100-node path graph in the supported format
        let p100: String = (0..99).map(|i| format!("{i} {}\n", i + 1)).collect();
        let graph_path = tmp.path().join("p100.edges");
        fs::write(&graph_path, p100).unwrap();

        let report = cmd_select(&graph_path, &models_dir, false, &[]).unwrap();
        assert!(report.pred_auc.is_finite());
        assert!(report.pred_topk.is_finite());
        assert!(AlgorithmId::parse(&report.pred_model_auc).is_some());
        assert!(AlgorithmId::parse(&report.pred_model_topk).is_some());
        assert_eq!(report.nodes, 100);
        assert_eq!(report.edges, 99);

        // identical file twice: identical report
        let again = cmd_select(&graph_path, &models_dir, false, &[]).unwrap();
        assert_eq!(report, again);

        // restricted mode stays within {RF, SAGE}
        let restricted = cmd_select(&graph_path, &models_dir, true, &[]).unwrap();
        assert!(["RF", "SAGE"].contains(&restricted.pred_model_auc.as_str()));

        // missing models give a remediation hint
        let missing = cmd_select(&graph_path, tmp.path(), false, &[]);
        assert!(matches!(missing, Err(Error::MissingModel { .. })));
    }
}
