//! The 42 topological level-0 predictors and the training feature table.
//!
//! A feature row for a candidate pair holds, in fixed column order, the 8
//! global predictors of the graph, the 14 pair predictors, and the 10 node
//! predictors for each endpoint. The column order is part of the serialized
//! schema and never changes within a schema version.

mod global;
mod node;
mod pair;

pub use global::{
    degree_assortativity, diameter, global_features, local_clustering, transitivity,
    GlobalFeatures,
};
pub use node::{
    betweenness, closeness, eigenvector_centrality, katz_centrality, load_centrality,
    node_features, pagerank, spectral_radius, NodeFeatureTable, NodeFeatures,
    KATZ_ATTENUATION_FRACTION, PAGERANK_DAMPING,
};
pub use pair::{pair_features, PairFeatures};

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lowrank::{low_rank_context, LowRankContext, DEFAULT_RANK};
use crate::scalar::Real;
use crate::split::CandidatePairSet;

/// Schema tag written into serialized feature tables.
pub const FEATURE_SCHEMA_VERSION: &str = "linkpred.features/1";

/// Number of predictor columns.
pub const NUM_FEATURES: usize = 42;

/// Column names in serialization order.
pub const COLUMN_NAMES: [&str; NUM_FEATURES] = [
    "N", "OE", "AD", "VD", "ND", "DA", "NT", "ACC", // global
    "CN", "SP", "LHN", "PPR", "PA", "JC", "AA", "RA", "LRA", "DLRA", "MLRA", "LRA_APPROX",
    "DLRA_APPROX", "MLRA_APPROX", // pair
    "LCC_I", "AND_I", "SPBC_I", "CC_I", "DC_I", "EC_I", "KC_I", "LNT_I", "PR_I", "LC_I",
    "LCC_J", "AND_J", "SPBC_J", "CC_J", "DC_J", "EC_J", "KC_J", "LNT_J", "PR_J", "LC_J",
];

/// Labeled table of predictor rows, one per candidate pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix<F> {
    columns: Vec<String>,
    pairs: Vec<(usize, usize)>,
    values: Vec<F>,
    labels: Vec<u8>,
}

impl<F: Real> FeatureMatrix<F> {
    pub fn new_empty() -> Self {
        FeatureMatrix {
            columns: COLUMN_NAMES.iter().map(|s| s.to_string()).collect(),
            pairs: Vec::new(),
            values: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Build a table with arbitrary columns (synthetic datasets, tests).
    pub fn from_rows(
        columns: Vec<String>,
        pairs: Vec<(usize, usize)>,
        rows: Vec<Vec<F>>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        if rows.len() != labels.len() || rows.len() != pairs.len() {
            return Err(Error::InvalidArgument(
                "rows, labels and pairs must have equal length".into(),
            ));
        }
        let width = columns.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for row in &rows {
            if row.len() != width {
                return Err(Error::InvalidArgument(format!(
                    "row width {} does not match {} columns",
                    row.len(),
                    width
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            columns,
            pairs,
            values,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.values[r * self.n_cols()..(r + 1) * self.n_cols()]
    }

    pub fn label(&self, r: usize) -> u8 {
        self.labels[r]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn pair(&self, r: usize) -> (usize, usize) {
        self.pairs[r]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - pos, pos)
    }

    pub fn push_row(&mut self, pair: (usize, usize), row: &[F], label: u8) {
        assert_eq!(row.len(), self.n_cols());
        self.pairs.push(pair);
        self.values.extend_from_slice(row);
        self.labels.push(label);
    }

    /// New table containing the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix<F> {
        let mut out = FeatureMatrix {
            columns: self.columns.clone(),
            pairs: Vec::with_capacity(indices.len()),
            values: Vec::with_capacity(indices.len() * self.n_cols()),
            labels: Vec::with_capacity(indices.len()),
        };
        for &r in indices {
            out.pairs.push(self.pairs[r]);
            out.values.extend_from_slice(self.row(r));
            out.labels.push(self.labels[r]);
        }
        out
    }

    /// Apply a function to one column in place (test support for
    /// monotone-transform invariance checks).
    pub fn map_column(&mut self, col: usize, f: impl Fn(F) -> F) {
        let w = self.n_cols();
        for r in 0..self.n_rows() {
            self.values[r * w + col] = f(self.values[r * w + col]);
        }
    }

    /// Serialize as CSV with a leading `# schema` comment line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {FEATURE_SCHEMA_VERSION}")?;
        writeln!(w, "node_i,node_j,{},label", self.columns.join(","))?;
        for r in 0..self.n_rows() {
            let (i, j) = self.pairs[r];
            write!(w, "{i},{j}")?;
            for v in self.row(r) {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{}", self.labels[r])?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let schema = lines
            .next()
            .ok_or_else(|| Error::Format("empty feature csv".into()))??;
        if schema.trim() != format!("# {FEATURE_SCHEMA_VERSION}") {
            return Err(Error::Format(format!(
                "unsupported feature schema: {schema}"
            )));
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("missing header".into()))??;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[0] != "node_i" || cols[1] != "node_j" || cols[cols.len() - 1] != "label"
        {
            return Err(Error::Format("malformed feature header".into()));
        }
        let columns: Vec<String> = cols[2..cols.len() - 1].iter().map(|s| s.to_string()).collect();
        let mut out = FeatureMatrix {
            columns,
            pairs: Vec::new(),
            values: Vec::new(),
            labels: Vec::new(),
        };
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Format(format!("bad field count in row: {line}")));
            }
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Format(format!("bad id {s}: {e}")))
            };
            let i = parse_usize(fields[0])?;
            let j = parse_usize(fields[1])?;
            out.pairs.push((i, j));
            for f in &fields[2..fields.len() - 1] {
                let v: f64 = f
                    .parse()
                    .map_err(|e| Error::Format(format!("bad value {f}: {e}")))?;
                out.values.push(F::of_f64(v));
            }
            out.labels.push(
                fields[fields.len() - 1]
                    .parse::<u8>()
                    .map_err(|e| Error::Format(format!("bad label: {e}")))?,
            );
        }
        Ok(out)
    }
}

/// Shared per-graph state for batch feature extraction.
pub struct PredictorContext<F> {
    pub globals: GlobalFeatures<F>,
    pub nodes: NodeFeatureTable<F>,
    pub lowrank: LowRankContext<F>,
    ppr: HashMap<usize, Vec<F>>,
}

impl<F: Real> PredictorContext<F> {
    /// Precompute everything needed to emit rows for the given pairs.
    pub fn new(graph: &Graph, pairs: &[(usize, usize)]) -> Self {
        let globals = global_features(graph);
        let nodes = NodeFeatureTable::compute(graph);
        let lowrank = low_rank_context(graph, DEFAULT_RANK);
        let mut sources: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        sources.sort_unstable();
        sources.dedup();
        let ppr: HashMap<usize, Vec<F>> = sources
            .into_par_iter()
            .map(|s| (s, pagerank(graph, Some(s))))
            .collect();
        PredictorContext {
            globals,
            nodes,
            lowrank,
            ppr,
        }
    }

    /// One 42-column feature row for an unconnected pair.
    pub fn feature_row(&self, graph: &Graph, i: usize, j: usize) -> [F; NUM_FEATURES] {
        let pf = pair::pair_features_with_ppr(graph, i, j, &self.lowrank, &self.ppr[&i], &self.ppr[&j]);
        let mut row = [F::zero(); NUM_FEATURES];
        row[..8].copy_from_slice(&self.globals.as_row());
        row[8..22].copy_from_slice(&pf.as_row());
        row[22..32].copy_from_slice(&self.nodes.get(i).as_row());
        row[32..42].copy_from_slice(&self.nodes.get(j).as_row());
        row
    }
}

/// Assemble the stacking training table: one row per candidate pair,
/// positives first, each block in input order.
pub fn build_feature_matrix<F: Real>(
    graph: &Graph,
    positives: &CandidatePairSet,
    negatives: &CandidatePairSet,
) -> Result<FeatureMatrix<F>> {
    positives.validate_against(graph)?;
    negatives.validate_against(graph)?;
    let pos_set: HashSet<(usize, usize)> = positives
        .pairs
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    for &(a, b) in &negatives.pairs {
        if pos_set.contains(&(a.min(b), a.max(b))) {
            return Err(Error::InvalidArgument(format!(
                "pair ({a},{b}) appears in both positives and negatives"
            )));
        }
    }

    let all_pairs: Vec<((usize, usize), u8)> = positives
        .pairs
        .iter()
        .map(|&p| (p, 1u8))
        .chain(negatives.pairs.iter().map(|&p| (p, 0u8)))
        .collect();
    let ctx = PredictorContext::<F>::new(graph, &positives.pairs.iter().chain(&negatives.pairs).copied().collect::<Vec<_>>());

    let rows: Vec<[F; NUM_FEATURES]> = all_pairs
        .par_iter()
        .map(|&((i, j), _)| ctx.feature_row(graph, i, j))
        .collect();

    let mut out = FeatureMatrix::new_empty();
    for (((pair, label), row), _) in all_pairs.iter().zip(rows.iter()).zip(0..) {
        out.push_row(*pair, row, *label);
    }
    Ok(out)
}
