//! Link prediction toolkit for simple undirected networks.
//!
//! Pipeline pieces:
//! - edge-list ingestion and the uniform edge-holdout protocol ([`graph`], [`split`])
//! - 42 topological pair predictors over an observed network ([`predictors`])
//! - supervised stacking of those predictors (RF, boosted trees, logistic
//!   regression, RBF-SVM) with SMOTE class balancing ([`stacking`], [`smote`])
//! - minimal GCN / GraphSAGE link scorers with learnable embeddings ([`gnn`])
//! - AUC and Top-k evaluation ([`eval`])
//! - structural profiling plus a meta-learner that picks the best algorithm
//!   for a network without running any of them ([`meta`])
//! - run orchestration, manifests and report generation ([`harness`])
//!
//! Numeric kernels are generic over the scalar type via [`scalar::Real`];
//! the aliases below pin the `f64` instantiations used by the CLI.

pub mod error;
pub mod eval;
pub mod gnn;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod lowrank;
pub mod meta;
pub mod predictors;
pub mod rng;
pub mod scalar;
pub mod smote;
pub mod split;
pub mod stacking;

pub use error::{Error, Result};
pub use graph::Graph;
pub use scalar::Real;
pub use split::{CandidatePairSet, HoldoutSplit, NestedSplit};

/// `f64` feature table, the default working precision.
pub type FeatureMatrix64 = predictors::FeatureMatrix<f64>;
/// `f32` feature table for memory-constrained runs.
pub type FeatureMatrix32 = predictors::FeatureMatrix<f32>;
/// `f64` low-rank adjacency context.
pub type LowRankContext64 = lowrank::LowRankContext<f64>;
/// `f64` stacking model.
pub type TrainedStacker64 = stacking::TrainedStacker<f64>;
/// `f64` graph neural model.
pub type GnnModel64 = gnn::GnnModel<f64>;
/// `f64` network structural profile.
pub type NetworkProfile64 = meta::NetworkProfile<f64>;
