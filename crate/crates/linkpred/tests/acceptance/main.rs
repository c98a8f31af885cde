//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).

mod graphs;
mod oracle;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use linkpred::eval;
use linkpred::gnn::{self, GnnArchitecture, GnnConfig, Propagator};
use linkpred::graph::Graph;
use linkpred::harness::{self, RunConfig};
use linkpred::lowrank::{APPROX_ITERS, APPROX_RANK, DEFAULT_RANK};
use linkpred::meta::{
    self, AlgoMetrics, AlgorithmId, MetaGrid, MetaMode, MetricKind, NetworkProfile,
    PerformanceRecord, ALGORITHM_ORDER,
};
use linkpred::predictors::{FeatureMatrix, PredictorContext};
use linkpred::rng::{self, rng_from_seed};
use linkpred::smote::smote_balance;
use linkpred::split;

fn criterion(name: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("ACCEPTANCE {name}: PASS ({detail})"),
        Err(why) => {
            println!("ACCEPTANCE {name}: FAIL ({why})");
            panic!("acceptance criterion {name} failed: {why}");
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/social")
        .join(name)
}

// ---------------------------------------------------------------- 1

fn check_graph_against_oracle(g: &Graph) -> Result<(), String> {
    let dg = oracle::DenseGraph::new(g);
    let dist = oracle::distances(&dg);
    let pairs: Vec<(usize, usize)> = g.non_edges();
    let ctx = PredictorContext::<f64>::new(g, &pairs);
    let octx = oracle::PairOracleContext::new(&dg, DEFAULT_RANK, APPROX_RANK, APPROX_ITERS);

    // global block
    let impl_global = ctx.globals.as_row();
    let oracle_global = oracle::global_row(&dg, &dist);
    for (c, (a, b)) in impl_global.iter().zip(oracle_global.iter()).enumerate() {
        if !close(*a, *b) {
            return Err(format!("global col {c}: {a} vs {b} on {g}"));
        }
    }

    // node block for every node
    let between = oracle::betweenness(&dg, &dist);
    let load = oracle::load_centrality(&dg, &dist);
    let ec = oracle::eigenvector(&dg);
    let kc = oracle::katz(&dg);
    let pr = oracle::pagerank(&dg, None);
    for v in 0..g.node_count() {
        let impl_node = ctx.nodes.get(v).as_row();
        let oracle_node = oracle::node_row(&dg, &dist, &between, &load, &ec, &kc, &pr, v);
        for (c, (a, b)) in impl_node.iter().zip(oracle_node.iter()).enumerate() {
            if !close(*a, *b) {
                return Err(format!("node {v} col {c}: {a} vs {b} on {g}"));
            }
        }
    }

    // pair block for every non-edge
    for &(i, j) in &pairs {
        let row = ctx.feature_row(g, i, j);
        let impl_pair = &row[8..22];
        let oracle_pair = oracle::pair_row(&dg, &octx, i, j);
        for (c, (a, b)) in impl_pair.iter().zip(oracle_pair.iter()).enumerate() {
            let Some(b) = b else { continue }; // non-unique truncation
            if !close(*a, *b) {
                return Err(format!("pair ({i},{j}) col {c}: {a} vs {b} on {g}"));
            }
        }
    }
    Ok(())
}

#[test]
fn predictor_oracle_equivalence() {
    criterion("predictor-oracle-equivalence", || {
        let start = Instant::now();
        let mut graphs_checked = 0usize;
        for n in 2..=6 {
            for g in graphs::all_connected_graphs(n) {
                check_graph_against_oracle(&g)?;
                graphs_checked += 1;
            }
        }
        for n in [7usize, 8] {
            for s in 0..150u64 {
                let g = graphs::random_connected_graph(n, 9000 + n as u64 * 1000 + s);
                check_graph_against_oracle(&g)?;
                graphs_checked += 1;
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 300.0 {
            return Err(format!("took {elapsed:.1}s, budget is 300s"));
        }
        Ok(format!(
            "{graphs_checked} connected graphs, all 42 predictors within 1e-6, {elapsed:.1}s"
        ))
    });
}

// ---------------------------------------------------------------- 2

fn auc_double_loop(pos: &[f64], neg: &[f64]) -> (f64, f64) {
    let mut wins = 0u64;
    let mut ties = 0u64;
    for &p in pos {
        for &n in neg {
            if p > n {
                wins += 1;
            } else if p == n {
                ties += 1;
            }
        }
    }
    let total = (pos.len() * neg.len()) as f64;
    (
        wins as f64 / total,
        (2 * wins + ties) as f64 / (2.0 * total),
    )
}

#[test]
fn auc_conformance() {
    criterion("auc-conformance", || {
        let worked = eval::auc_both(&[0.8, 0.4], &[0.6, 0.2]).map_err(|e| e.to_string())?;
        if worked.strict != 0.75 || worked.tie_credit != 0.75 {
            return Err(format!("worked example gave {worked:?}, expected 0.75"));
        }

        let mut r = rng_from_seed(77);
        for inst in 0..1000 {
            // mostly small instances plus a handful at the 1e4 scale
            let (np, nn) = if inst % 100 == 0 {
                (
                    1 + rng::uniform_usize(&mut r, 5000),
                    1 + rng::uniform_usize(&mut r, 5000),
                )
            } else {
                (
                    1 + rng::uniform_usize(&mut r, 150),
                    1 + rng::uniform_usize(&mut r, 150),
                )
            };
            let quantized = rng::uniform_f64(&mut r) < 0.5;
            let mut draw = |r: &mut rand_chacha::ChaCha8Rng| {
                if quantized {
                    rng::uniform_usize(r, 64) as f64 / 64.0
                } else {
                    rng::uniform_f64(r)
                }
            };
            let pos: Vec<f64> = (0..np).map(|_| draw(&mut r)).collect();
            let neg: Vec<f64> = (0..nn).map(|_| draw(&mut r)).collect();
            let fast = eval::auc_both(&pos, &neg).map_err(|e| e.to_string())?;
            let (strict, tie) = auc_double_loop(&pos, &neg);
            if fast.strict != strict || fast.tie_credit != tie {
                return Err(format!(
                    "instance {inst} (|P|={np}, |N|={nn}): fast {fast:?} vs loop ({strict}, {tie})"
                ));
            }
        }
        Ok("1000 instances exactly equal to the double loop, plus worked example".into())
    });
}

// ---------------------------------------------------------------- 3

#[test]
fn gnn_gradient_check() {
    criterion("gnn-gradient-check", || {
        let start = Instant::now();
        for (arch, seed) in [(GnnArchitecture::Gcn, 5u64), (GnnArchitecture::Sage, 6u64)] {
            let g = graphs::random_connected_graph(10, 100 + seed);
            let mut config = GnnConfig::new(arch, 2, 8, seed);
            config.dropout = 0.0;
            let model = gnn::GnnModel::<f64>::init(10, config);
            let prop = Propagator::for_config(&g, arch);
            let pos: Vec<(usize, usize)> = g.edges().iter().copied().take(6).collect();
            let neg: Vec<(usize, usize)> = g.non_edges().into_iter().take(6).collect();
            let (_, grads) = gnn::loss_and_gradients(&model, &prop, &pos, &neg, None)
                .map_err(|e| e.to_string())?;
            let analytic = grads.flatten();
            let base = model.flat_params();
            let mut probe = model.clone();
            let h = 1e-6;
            for (idx, &a) in analytic.iter().enumerate() {
                let mut plus = base.clone();
                plus[idx] += h;
                probe.set_flat_params(&plus);
                let (lp, _) = gnn::loss_and_gradients(&probe, &prop, &pos, &neg, None)
                    .map_err(|e| e.to_string())?;
                let mut minus = base.clone();
                minus[idx] -= h;
                probe.set_flat_params(&minus);
                let (lm, _) = gnn::loss_and_gradients(&probe, &prop, &pos, &neg, None)
                    .map_err(|e| e.to_string())?;
                let fd = (lp - lm) / (2.0 * h);
                let denom = a.abs().max(fd.abs()).max(1.0);
                if (a - fd).abs() / denom >= 1e-4 {
                    return Err(format!(
                        "{} param {idx}: analytic {a} vs fd {fd}",
                        arch.name()
                    ));
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 60.0 {
            return Err(format!("took {elapsed:.1}s, budget is 60s"));
        }
        Ok(format!(
            "GCN and SAGE analytic gradients within 1e-4 of central differences, {elapsed:.1}s"
        ))
    });
}

// ---------------------------------------------------------------- 4

#[test]
fn split_protocol_counts() {
    criterion("split-protocol-counts", || {
        let g = graphs::random_graph_exact_m(100, 1000, 4242);
        let variants = split::generate_variants(&g, 0.8, 10, 99).map_err(|e| e.to_string())?;
        for (i, v) in variants.iter().enumerate() {
            if v.observed.edge_count() != 800 || v.heldout.len() != 200 {
                return Err(format!(
                    "variant {i}: |E'|={} |Y|={}",
                    v.observed.edge_count(),
                    v.heldout.len()
                ));
            }
            let nested = split::nested_split(&g, 0.8, v.seed).map_err(|e| e.to_string())?;
            if nested.training_graph().edge_count() != 640 {
                return Err(format!(
                    "variant {i}: |E''|={}",
                    nested.training_graph().edge_count()
                ));
            }
        }

        // uniformity: hold-out frequency of each edge over 1000 seeds.
        // Each seed holds out exactly 200 of 1000 edges, so the mean
        // frequency is exactly 0.2. Per-edge counts are Binomial(1000, 0.2)
        // with sigma ~ 0.0127, so "0.2 +- 0.02" is checked statistically:
        // a 5-sigma envelope on every edge plus the expected (~89%)
        // concentration inside +-0.02.
        let edge_index: std::collections::HashMap<(usize, usize), usize> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let trials = 1000usize;
        let mut held = vec![0usize; g.edge_count()];
        for seed in 0..trials {
            let s = split::sample_observed(&g, 0.8, 31_000 + seed as u64)
                .map_err(|e| e.to_string())?;
            for e in &s.heldout {
                held[edge_index[e]] += 1;
            }
        }
        let freqs: Vec<f64> = held.iter().map(|&h| h as f64 / trials as f64).collect();
        let mean = freqs.iter().sum::<f64>() / freqs.len() as f64;
        if (mean - 0.2).abs() > 1e-12 {
            return Err(format!("mean holdout frequency {mean} != 0.2"));
        }
        let sigma = (0.2 * 0.8 / trials as f64).sqrt();
        let worst = freqs
            .iter()
            .map(|f| (f - 0.2).abs())
            .fold(0.0f64, f64::max);
        if worst > 5.0 * sigma {
            return Err(format!("an edge deviates {worst:.4} (> 5 sigma)"));
        }
        let inside = freqs.iter().filter(|f| (**f - 0.2).abs() <= 0.02).count();
        let frac_inside = inside as f64 / freqs.len() as f64;
        if frac_inside < 0.85 {
            return Err(format!(
                "only {frac_inside:.3} of edges within 0.2 +- 0.02 (expect ~0.89)"
            ));
        }
        Ok(format!(
            "counts 800/200/640 on all 10 variants; mean freq exactly 0.2, max dev {worst:.4}, {:.1}% within +-0.02",
            100.0 * frac_inside
        ))
    });
}

// ---------------------------------------------------------------- 5

#[test]
fn desk_scale_end_to_end() {
    criterion("desk-scale-end-to-end", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config = RunConfig {
            inputs: vec![
                data_file("karate.edges"),
                data_file("les_miserables.edges"),
                data_file("lesmis_ego_valjean.edges"),
                data_file("lesmis_ego_gavroche.edges"),
                data_file("southern_women_w3.edges"),
            ],
            domain_index: Some(data_file("domains.csv")),
            alpha: 0.8,
            variants: 10,
            algorithms: vec![AlgorithmId::Rf],
            seed: 20260809,
            negative_cap: 1000,
            output_dir: tmp.path().to_path_buf(),
            record_timing: true,
            ..RunConfig::default()
        };
        let out = harness::cmd_benchmark(&config).map_err(|e| e.to_string())?;
        let ok: Vec<&harness::LedgerRow> = out.rows.iter().filter(|r| r.status == "ok").collect();
        if ok.len() != 50 {
            return Err(format!("expected 50 successful rows, got {}", ok.len()));
        }
        let mean_auc: f64 = ok.iter().map(|r| r.auc.unwrap()).sum::<f64>() / ok.len() as f64;
        if mean_auc < 0.80 {
            return Err(format!(
                "RF mean AUC {mean_auc:.4} over 5 social networks x 10 variants < 0.80"
            ));
        }
        Ok(format!(
            "RF mean AUC {mean_auc:.4} over 5 real social networks x 10 variants"
        ))
    });
}

// ---------------------------------------------------------------- 6, 7

/// Synthetic meta dataset where the best algorithm is a threshold rule on
/// mean degree and the best accuracy is a noiseless function of it.
fn planted_records(n_networks: usize, variants: usize, seed: u64) -> Vec<PerformanceRecord> {
    let mut r = rng_from_seed(seed);
    let mut out = Vec::new();
    for net in 0..n_networks {
        for v in 0..variants {
            let mean_degree = 1.0 + 7.0 * rng::uniform_f64(&mut r);
            let best_is_rf = mean_degree < 4.0;
            let base = 0.6 + 0.04 * mean_degree;
            let mut metrics = BTreeMap::new();
            for a in ALGORITHM_ORDER {
                let is_best = if best_is_rf {
                    a == AlgorithmId::Rf
                } else {
                    a == AlgorithmId::Sage
                };
                let value = if is_best { base } else { base - 0.2 };
                metrics.insert(a, AlgoMetrics { auc: value, topk: value });
            }
            out.push(PerformanceRecord {
                network_id: format!("net{net}"),
                variant_seed: v as u64,
                profile: NetworkProfile {
                    mean_local_clustering: rng::uniform_f64(&mut r),
                    mean_geodesic: 1.0 + 4.0 * rng::uniform_f64(&mut r),
                    degree_assortativity: rng::uniform_f64(&mut r) - 0.5,
                    node_count: 50.0 + 400.0 * rng::uniform_f64(&mut r),
                    mean_degree,
                    degree_variance: 5.0 * rng::uniform_f64(&mut r),
                },
                metrics,
            });
        }
    }
    out
}

#[test]
fn meta_pipeline_on_planted_data() {
    criterion("meta-pipeline-planted", || {
        let records = planted_records(40, 5, 17);

        // best-achievable-accuracy regressor on the noiseless target
        let regressor = meta::train_regressor(&records, MetricKind::Auc, 100, 23)
            .map_err(|e| e.to_string())?;
        let r2 = regressor.mean_r2();
        if r2 < 0.95 {
            return Err(format!("regressor mean r^2 {r2:.4} < 0.95"));
        }
        let ranked = meta::gini_importances(&regressor);
        if ranked[0].0 != "mean_degree" {
            return Err(format!("planted feature not first: importances {ranked:?}"));
        }

        // restricted classifier accuracy on a held-out grouped split
        let (train_idx, test_idx) =
            meta::grouped_split(&records, 0.2, 31).map_err(|e| e.to_string())?;
        let train: Vec<PerformanceRecord> =
            train_idx.iter().map(|&i| records[i].clone()).collect();
        let clf = meta::train_meta_classifier(
            &train,
            MetaMode::Restricted,
            MetricKind::Auc,
            &MetaGrid::default(),
            37,
        )
        .map_err(|e| e.to_string())?;
        let correct = test_idx
            .iter()
            .filter(|&&i| {
                clf.predict(&records[i].profile)
                    == meta::oracle_select(
                        &records[i],
                        MetricKind::Auc,
                        MetaMode::Restricted.algorithm_set(),
                    )
            })
            .count();
        let accuracy = correct as f64 / test_idx.len() as f64;
        if accuracy < 0.9 {
            return Err(format!("restricted held-out accuracy {accuracy:.3} < 0.9"));
        }
        Ok(format!(
            "regressor mean r^2 {r2:.3}, planted feature first (weight {:.2}), restricted accuracy {accuracy:.3}",
            ranked[0].1
        ))
    });
}

#[test]
fn oracle_dominance() {
    criterion("oracle-dominance", || {
        let records = planted_records(30, 4, 41);
        let grid = MetaGrid::default();
        let full = meta::train_meta_classifier(&records, MetaMode::Full, MetricKind::Auc, &grid, 43)
            .map_err(|e| e.to_string())?;
        let restricted = meta::train_meta_classifier(
            &records,
            MetaMode::Restricted,
            MetricKind::Auc,
            &grid,
            47,
        )
        .map_err(|e| e.to_string())?;

        let mut full_oracle_sum = 0.0;
        let mut restricted_oracle_sum = 0.0;
        for rec in &records {
            let oracle_best = rec.best_over(MetricKind::Auc, &ALGORITHM_ORDER).1;
            let restricted_best = rec
                .best_over(MetricKind::Auc, MetaMode::Restricted.algorithm_set())
                .1;
            let selected_full = rec.metrics[&full.predict(&rec.profile)].auc;
            let selected_restricted = rec.metrics[&restricted.predict(&rec.profile)].auc;
            let worst = ALGORITHM_ORDER
                .iter()
                .map(|a| rec.metrics[a].auc)
                .fold(f64::INFINITY, f64::min);
            if !(oracle_best >= selected_full && selected_full >= worst) {
                return Err(format!(
                    "full: oracle {oracle_best} selected {selected_full} worst {worst} on {}",
                    rec.network_id
                ));
            }
            if !(restricted_best >= selected_restricted && selected_restricted >= worst) {
                return Err(format!(
                    "restricted: oracle {restricted_best} selected {selected_restricted} worst {worst}"
                ));
            }
            if oracle_best < restricted_best {
                return Err("full oracle below restricted oracle".into());
            }
            full_oracle_sum += oracle_best;
            restricted_oracle_sum += restricted_best;
        }
        if full_oracle_sum < restricted_oracle_sum {
            return Err("full oracle mean below restricted oracle mean".into());
        }
        Ok(format!(
            "dominance exact on {} records; full oracle mean {:.4} >= restricted {:.4}",
            records.len(),
            full_oracle_sum / records.len() as f64,
            restricted_oracle_sum / records.len() as f64
        ))
    });
}

// ---------------------------------------------------------------- 8

#[test]
fn benchmark_determinism_across_workers() {
    criterion("benchmark-determinism", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let base = RunConfig {
            inputs: vec![
                data_file("florentine_families.edges"),
                data_file("kite.edges"),
            ],
            domain_index: Some(data_file("domains.csv")),
            variants: 2,
            algorithms: vec![AlgorithmId::Rf],
            seed: 5,
            negative_cap: 300,
            output_dir: tmp.path().join("a"),
            threads: 1,
            record_timing: false,
            ..RunConfig::default()
        };
        let run1 = harness::cmd_benchmark(&base).map_err(|e| e.to_string())?;

        let mut wide = base.clone();
        wide.threads = 4;
        wide.output_dir = tmp.path().join("b");
        let run2 = harness::cmd_benchmark(&wide).map_err(|e| e.to_string())?;

        let bytes1 = std::fs::read(&run1.ledger_path).map_err(|e| e.to_string())?;
        let bytes2 = std::fs::read(&run2.ledger_path).map_err(|e| e.to_string())?;
        if bytes1 != bytes2 {
            return Err("ledgers differ between 1 and 4 workers".into());
        }

        // replay from the stored manifest
        let manifest_text =
            std::fs::read_to_string(&run1.manifest_path).map_err(|e| e.to_string())?;
        let manifest =
            harness::RunManifest::from_json(&manifest_text).map_err(|e| e.to_string())?;
        let mut replay_config = manifest.config;
        replay_config.output_dir = tmp.path().join("c");
        replay_config.threads = 3;
        let run3 = harness::cmd_benchmark(&replay_config).map_err(|e| e.to_string())?;
        let bytes3 = std::fs::read(&run3.ledger_path).map_err(|e| e.to_string())?;
        if bytes1 != bytes3 {
            return Err("manifest replay produced a different ledger".into());
        }
        Ok("byte-identical ledgers across 1, 3 and 4 workers and manifest replay".into())
    });
}

// ---------------------------------------------------------------- 9

#[test]
fn smote_contract() {
    criterion("smote-contract", || {
        let mut r = rng_from_seed(8);
        let cols: Vec<String> = (0..6).map(|i| format!("f{i}")).collect();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut labels = Vec::new();
        for i in 0..80 {
            rows.push((0..6).map(|_| rng::uniform_f64(&mut r) * 3.0).collect());
            labels.push(0u8);
            if i < 15 {
                rows.push((0..6).map(|_| rng::uniform_f64(&mut r) + 5.0).collect());
                labels.push(1u8);
            }
        }
        let pairs: Vec<(usize, usize)> = (0..rows.len()).map(|i| (i, i + 1)).collect();
        let matrix =
            FeatureMatrix::from_rows(cols, pairs, rows, labels).map_err(|e| e.to_string())?;
        let balanced = smote_balance(&matrix, 19).map_err(|e| e.to_string())?;

        let (neg, pos) = balanced.class_counts();
        if neg != pos {
            return Err(format!("classes unbalanced after SMOTE: {neg} vs {pos}"));
        }
        for i in 0..matrix.n_rows() {
            if balanced.row(i) != matrix.row(i) || balanced.label(i) != matrix.label(i) {
                return Err(format!("original row {i} modified"));
            }
        }

        let minority: Vec<usize> = (0..matrix.n_rows())
            .filter(|&i| matrix.label(i) == 1)
            .collect();
        for s_idx in matrix.n_rows()..balanced.n_rows() {
            let s = balanced.row(s_idx);
            let mut on_segment = false;
            'pairs: for &a in &minority {
                for &b in &minority {
                    if a == b {
                        continue;
                    }
                    let ra = matrix.row(a);
                    let rb = matrix.row(b);
                    let mut t = None;
                    for d in 0..ra.len() {
                        let span: f64 = rb[d] - ra[d];
                        if span.abs() > 1e-12 {
                            t = Some((s[d] - ra[d]) / span);
                            break;
                        }
                    }
                    let Some(t) = t else { continue };
                    if !(-1e-9..=1.0 + 1e-9).contains(&t) {
                        continue;
                    }
                    if (0..ra.len()).all(|d| (ra[d] + t * (rb[d] - ra[d]) - s[d]).abs() <= 1e-9) {
                        on_segment = true;
                        break 'pairs;
                    }
                }
            }
            if !on_segment {
                return Err(format!(
                    "synthetic row {s_idx} not collinear with any minority pair"
                ));
            }
        }
        Ok(format!(
            "{} -> {} rows, classes equal, originals intact, all synthetics on minority segments",
            matrix.n_rows(),
            balanced.n_rows()
        ))
    });
}
