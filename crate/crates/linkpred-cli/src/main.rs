//! Command-line front end for the link prediction toolkit.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use linkpred::gnn::{self, GnnArchitecture, GnnConfig, TrainOptions};
use linkpred::graph::Graph;
use linkpred::harness::{self, RunConfig, RunManifest};
use linkpred::meta::AlgorithmId;
use linkpred::predictors::build_feature_matrix;
use linkpred::rng::derive_seed;
use linkpred::smote::smote_balance;
use linkpred::split::{self, CandidatePairSet};
use linkpred::stacking::{self, HyperGrid, StackerKind, TrainedStacker};
use linkpred::{eval, FeatureMatrix64};

#[derive(Parser)]
#[command(name = "linkpred", version, about = "Link prediction benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SplitArgs {
    /// Edge retention rate.
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
    /// Base random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an edge list and report its size and cleanup counts.
    Ingest { input: PathBuf },

    /// Apply the edge holdout and write a replayable split manifest.
    Split {
        input: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        /// Manifest output path (JSON).
        #[arg(long, default_value = "split.json")]
        out: PathBuf,
    },

    /// Write the training feature table of a nested split as CSV.
    Features {
        input: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        /// Cap on sampled negative pairs.
        #[arg(long, default_value_t = 10_000)]
        negative_cap: usize,
        #[arg(long, default_value = "features.csv")]
        out: PathBuf,
    },

    /// Train one algorithm on a nested split and save the model artifact.
    Train {
        input: PathBuf,
        /// RF, XGB, LR, SVM, GCN or SAGE.
        #[arg(long)]
        algorithm: String,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 10_000)]
        negative_cap: usize,
        /// Cross-validation folds for the stacking grid search.
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Epoch budget for the neural models.
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
        /// Per-epoch loss CSV for neural models.
        #[arg(long)]
        epoch_log: Option<PathBuf>,
    },

    /// Evaluate a saved model on the holdout of the same split.
    Eval {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 10_000)]
        negative_cap: usize,
        /// Override the top-k budget rule.
        #[arg(long)]
        k: Option<usize>,
    },

    /// Run the full benchmark over a corpus of edge lists.
    Benchmark {
        /// Edge-list files (ignored when --manifest is given).
        inputs: Vec<PathBuf>,
        /// TOML run configuration; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replay a previous run manifest exactly.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Sidecar CSV mapping file stems to domain tags.
        #[arg(long)]
        domains: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        variants: Option<usize>,
        /// Comma-separated algorithm list.
        #[arg(long)]
        algorithms: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        negative_cap: Option<usize>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Skip wall-clock timing for byte-identical ledgers.
        #[arg(long)]
        no_timing: bool,
    },

    /// Train the meta models from a benchmark records CSV.
    MetaTrain {
        records: PathBuf,
        #[arg(long, default_value = "models")]
        out_dir: PathBuf,
        /// Repeated grouped splits for the accuracy regressor.
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },

    /// Predict the best algorithm for a network without training any.
    Select {
        input: PathBuf,
        #[arg(long, default_value = "models")]
        models: PathBuf,
        /// Choose between RF and SAGE only.
        #[arg(long)]
        restricted: bool,
        /// Comma-separated algorithms to exclude (cost control).
        #[arg(long)]
        exclude: Option<String>,
    },

    /// Summarize a benchmark ledger into the report tables.
    Report {
        ledger: PathBuf,
        /// Relative nearly-best margin.
        #[arg(long, default_value_t = harness::NEARLY_BEST_MARGIN)]
        margin: f64,
        /// Directory for summary.csv and rates.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn read_graph(path: &PathBuf) -> Result<(Graph, linkpred::graph::IngestStats)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Graph::parse_edge_list(&text)?)
}

fn parse_algorithms(s: &str) -> Result<Vec<AlgorithmId>> {
    s.split(',')
        .map(|t| {
            AlgorithmId::parse(t.trim())
                .with_context(|| format!("unknown algorithm {t:?} (RF, XGB, LR, SVM, GCN, SAGE)"))
        })
        .collect()
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest { input } => {
            let (graph, stats) = read_graph(&input)?;
            println!(
                "{} nodes={} edges={} duplicates_dropped={} self_loops_dropped={}",
                input.display(),
                graph.node_count(),
                graph.edge_count(),
                stats.duplicate_edges,
                stats.self_loops
            );
        }

        Command::Split { input, split: s, out } => {
            let (graph, _) = read_graph(&input)?;
            let holdout = split::sample_observed(&graph, s.alpha, s.seed)?;
            let manifest = split::manifest_of(&graph, &holdout);
            fs::write(&out, serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "alpha={} seed={} retained={} heldout={} manifest={}",
                s.alpha,
                s.seed,
                holdout.observed.edge_count(),
                holdout.heldout.len(),
                out.display()
            );
        }

        Command::Features {
            input,
            split: s,
            negative_cap,
            out,
        } => {
            let (graph, _) = read_graph(&input)?;
            let nested = split::nested_split(&graph, s.alpha, s.seed)?;
            let negatives = split::sample_negatives_excluding(
                nested.observed_graph(),
                negative_cap,
                derive_seed(s.seed, 1),
                nested.inner_positives(),
            )?;
            let positives = CandidatePairSet::positives(nested.inner_positives());
            let matrix: FeatureMatrix64 =
                build_feature_matrix(nested.training_graph(), &positives, &negatives)?;
            let mut file = fs::File::create(&out)?;
            matrix.write_csv(&mut file)?;
            println!(
                "rows={} columns={} out={}",
                matrix.n_rows(),
                matrix.n_cols(),
                out.display()
            );
        }

        Command::Train {
            input,
            algorithm,
            split: s,
            negative_cap,
            folds,
            epochs,
            out,
            epoch_log,
        } => {
            let (graph, _) = read_graph(&input)?;
            let nested = split::nested_split(&graph, s.alpha, s.seed)?;
            if let Some(kind) = StackerKind::parse(&algorithm) {
                let negatives = split::sample_negatives_excluding(
                    nested.observed_graph(),
                    negative_cap,
                    derive_seed(s.seed, 1),
                    nested.inner_positives(),
                )?;
                let positives = CandidatePairSet::positives(nested.inner_positives());
                let matrix: FeatureMatrix64 =
                    build_feature_matrix(nested.training_graph(), &positives, &negatives)?;
                let balanced = smote_balance(&matrix, derive_seed(s.seed, 2))?;
                let model = stacking::train_stacker(
                    kind,
                    &balanced,
                    &HyperGrid::default(),
                    folds,
                    derive_seed(s.seed, 3),
                )?;
                println!(
                    "algorithm={} chosen={:?} cv_auc={:.4}",
                    kind.name(),
                    model.params,
                    model.cv_auc
                );
                fs::write(&out, model.to_json()?)?;
                println!("model={}", out.display());
            } else if let Some(arch) = GnnArchitecture::parse(&algorithm) {
                let (best, cells) = gnn::tune_gnn(
                    &nested,
                    arch,
                    &[2, 3, 4],
                    &[32, 64, 128],
                    epochs,
                    negative_cap,
                    derive_seed(s.seed, 4),
                )?;
                for c in &cells {
                    println!(
                        "cell layers={} hidden={} val_auc={:.4}",
                        c.num_layers, c.hidden_channels, c.val_auc
                    );
                }
                println!(
                    "algorithm={} chosen_layers={} chosen_hidden={}",
                    arch.name(),
                    best.num_layers,
                    best.hidden_channels
                );
                let retrain = GnnConfig {
                    seed: derive_seed(s.seed, 5),
                    ..best
                };
                let (model, stats) =
                    gnn::train_gnn(nested.observed_graph(), retrain, &TrainOptions::default())?;
                if let Some(log_path) = epoch_log {
                    let mut csv = String::from("epoch,loss,val_auc\n");
                    for st in &stats {
                        csv.push_str(&format!(
                            "{},{},{}\n",
                            st.epoch,
                            st.loss,
                            st.val_auc.map(|v| v.to_string()).unwrap_or_default()
                        ));
                    }
                    fs::write(&log_path, csv)?;
                    println!("epoch_log={}", log_path.display());
                }
                fs::write(&out, model.to_json()?)?;
                println!("model={}", out.display());
            } else {
                bail!("unknown algorithm {algorithm:?} (RF, XGB, LR, SVM, GCN, SAGE)");
            }
        }

        Command::Eval {
            input,
            model,
            split: s,
            negative_cap,
            k,
        } => {
            let (graph, _) = read_graph(&input)?;
            let nested = split::nested_split(&graph, s.alpha, s.seed)?;
            let positives = nested.outer_positives().to_vec();
            let negatives = split::sample_negatives_excluding(
                nested.observed_graph(),
                negative_cap,
                derive_seed(s.seed, 100),
                &positives,
            )?;
            let text = fs::read_to_string(&model)?;
            let scores: Vec<f64> = if let Ok(stacker) = TrainedStacker::<f64>::from_json(&text) {
                let eval_pos = CandidatePairSet::positives(&positives);
                let matrix: FeatureMatrix64 =
                    build_feature_matrix(nested.observed_graph(), &eval_pos, &negatives)?;
                stacker.predict_scores(&matrix)?
            } else {
                let gnn_model = linkpred::GnnModel64::from_json(&text)
                    .context("model file is neither a stacker nor a gnn checkpoint")?;
                let mut pairs = positives.clone();
                pairs.extend_from_slice(&negatives.pairs);
                gnn_model.score_pairs(nested.observed_graph(), &pairs)
            };
            let np = positives.len();
            let auc = eval::auc(&scores[..np], &scores[np..])?;
            let k = k.unwrap_or_else(|| eval::choose_k(np));
            let scored: Vec<((usize, usize), f64)> = positives
                .iter()
                .chain(&negatives.pairs)
                .copied()
                .zip(scores.iter().copied())
                .collect();
            let topk = eval::topk(&scored, &positives, k)?;
            println!("auc={auc:.4} topk={topk:.4} k={k} heldout={np}");
        }

        Command::Benchmark {
            inputs,
            config,
            manifest,
            domains,
            alpha,
            variants,
            algorithms,
            seed,
            negative_cap,
            output_dir,
            threads,
            no_timing,
        } => {
            let mut run_config = if let Some(m) = manifest {
                RunManifest::from_json(&fs::read_to_string(&m)?)?.config
            } else if let Some(c) = config {
                RunConfig::from_toml_str(&fs::read_to_string(&c)?)?
            } else {
                RunConfig::default()
            };
            if !inputs.is_empty() {
                run_config.inputs = inputs;
            }
            if let Some(d) = domains {
                run_config.domain_index = Some(d);
            }
            if let Some(a) = alpha {
                run_config.alpha = a;
            }
            if let Some(v) = variants {
                run_config.variants = v;
            }
            if let Some(a) = &algorithms {
                run_config.algorithms = parse_algorithms(a)?;
            }
            if let Some(s) = seed {
                run_config.seed = s;
            }
            if let Some(c) = negative_cap {
                run_config.negative_cap = c;
            }
            if let Some(o) = output_dir {
                run_config.output_dir = o;
            }
            if let Some(t) = threads {
                run_config.threads = t;
            }
            if no_timing {
                run_config.record_timing = false;
            }
            let out = harness::cmd_benchmark(&run_config)?;
            let ok = out.rows.iter().filter(|r| r.status == "ok").count();
            let err = out.rows.len() - ok;
            println!(
                "run_dir={} rows={} ok={} error={}",
                out.run_dir.display(),
                out.rows.len(),
                ok,
                err
            );
            println!("ledger={}", out.ledger_path.display());
            println!("records={}", out.records_path.display());
            println!("manifest={}", out.manifest_path.display());
        }

        Command::MetaTrain {
            records,
            out_dir,
            repeats,
            seed,
        } => {
            let (auc_path, topk_path) =
                harness::cmd_meta_train(&records, &out_dir, repeats, seed)?;
            println!("meta_auc={}", auc_path.display());
            println!("meta_topk={}", topk_path.display());
        }

        Command::Select {
            input,
            models,
            restricted,
            exclude,
        } => {
            let excluded = match &exclude {
                Some(s) => parse_algorithms(s)?,
                None => Vec::new(),
            };
            let report = harness::cmd_select(&input, &models, restricted, &excluded)?;
            print!("{}", report.render_text());
        }

        Command::Report {
            ledger,
            margin,
            out_dir,
        } => {
            let rows = harness::read_ledger(&ledger)?;
            let report = harness::cmd_report(&rows, margin)?;
            print!("{}", report.render_text());
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir)?;
                report.write_csv(&dir)?;
                println!("csv tables under {}", dir.display());
            }
        }
    }
    Ok(())
}
