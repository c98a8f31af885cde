//! Edge holdout protocol: observed networks, nested splits, candidate pairs.
//!
//! Edges are retained uniformly at random at rate `alpha`; held-out edges
//! become the positive prediction targets. All sampling is a pure function
//! of `(graph, alpha, seed)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, derive_seed};

/// Sub-seed tag for the outer split of a nested split (identity stream).
const TAG_OUTER: u64 = 0;
/// Sub-seed tag for the inner split of a nested split.
const TAG_INNER: u64 = 1;

/// One round of uniform edge holdout: `G -> (G', Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutSplit {
    /// Observed network over the full node set.
    pub observed: Graph,
    /// Held-out positive edges, lexicographically sorted.
    pub heldout: Vec<(usize, usize)>,
    pub alpha: f64,
    pub seed: u64,
}

/// Two nested holdout rounds: `G -> G' -> G''`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedSplit {
    pub outer: HoldoutSplit,
    pub inner: HoldoutSplit,
}

impl NestedSplit {
    /// The innermost training network `G''`.
    pub fn training_graph(&self) -> &Graph {
        &self.inner.observed
    }

    /// The observed network `G'`.
    pub fn observed_graph(&self) -> &Graph {
        &self.outer.observed
    }

    /// Inner positives `Y' = E' - E''`.
    pub fn inner_positives(&self) -> &[(usize, usize)] {
        &self.inner.heldout
    }

    /// Outer positives `Y = E - E'`.
    pub fn outer_positives(&self) -> &[(usize, usize)] {
        &self.outer.heldout
    }
}

/// Candidate node pairs with binary labels.
///
/// Positives come from a holdout set; negatives from sampled non-edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePairSet {
    pub pairs: Vec<(usize, usize)>,
    pub labels: Vec<bool>,
}

impl CandidatePairSet {
    /// Positive candidates from held-out edges.
    pub fn positives(pairs: &[(usize, usize)]) -> Self {
        CandidatePairSet {
            pairs: pairs.to_vec(),
            labels: vec![true; pairs.len()],
        }
    }

    /// Negative candidates from sampled non-edges.
    pub fn negatives(pairs: &[(usize, usize)]) -> Self {
        CandidatePairSet {
            pairs: pairs.to_vec(),
            labels: vec![false; pairs.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Check the set invariants against the graph it was sampled from:
    /// no duplicate pair, no pair that is an observed edge.
    pub fn validate_against(&self, graph: &Graph) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.pairs.len());
        for &(i, j) in &self.pairs {
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate candidate pair ({i},{j})"
                )));
            }
            if graph.has_edge(i, j) {
                return Err(Error::InvalidArgument(format!(
                    "candidate pair ({i},{j}) is an observed edge"
                )));
            }
        }
        Ok(())
    }
}

/// Replayable description of a holdout split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub alpha: f64,
    pub seed: u64,
    /// Indices into the parent graph's canonical edge order that were retained.
    pub retained_edge_indices: Vec<usize>,
}

impl SplitManifest {
    /// Re-apply a recorded split to its parent graph.
    pub fn replay(&self, graph: &Graph) -> Result<HoldoutSplit> {
        let edges = graph.edges();
        let mut retained_mask = vec![false; edges.len()];
        for &idx in &self.retained_edge_indices {
            if idx >= edges.len() {
                return Err(Error::Format(format!(
                    "retained index {idx} out of range for m={}",
                    edges.len()
                )));
            }
            retained_mask[idx] = true;
        }
        Ok(build_split(graph, &retained_mask, self.alpha, self.seed))
    }
}

fn build_split(graph: &Graph, retained_mask: &[bool], alpha: f64, seed: u64) -> HoldoutSplit {
    let mut retained = Vec::new();
    let mut heldout = Vec::new();
    for (idx, &e) in graph.edges().iter().enumerate() {
        if retained_mask[idx] {
            retained.push(e);
        } else {
            heldout.push(e);
        }
    }
    HoldoutSplit {
        observed: Graph::from_canonical(graph.node_count(), retained),
        heldout,
        alpha,
        seed,
    }
}

/// Retain `round(alpha * m)` edges uniformly at random; the rest are held out.
///
/// The node set is preserved, so isolated nodes may appear in the observed
/// network.
pub fn sample_observed(graph: &Graph, alpha: f64, seed: u64) -> Result<HoldoutSplit> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "retention rate alpha must be in (0, 1], got {alpha}"
        )));
    }
    let m = graph.edge_count();
    if m == 0 {
        return Err(Error::InvalidArgument("graph has no edges to split".into()));
    }
    let keep = (alpha * m as f64).round() as usize;
    let mut rng = rng::rng_from_seed(seed);
    let kept = rng::sample_indices(&mut rng, m, keep.min(m));
    let mut mask = vec![false; m];
    for idx in kept {
        mask[idx] = true;
    }
    Ok(build_split(graph, &mask, alpha, seed))
}

/// Record a split as a replayable manifest.
pub fn manifest_of(graph: &Graph, split: &HoldoutSplit) -> SplitManifest {
    let retained: HashSet<(usize, usize)> = split.observed.edges().iter().copied().collect();
    let retained_edge_indices = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| retained.contains(e))
        .map(|(i, _)| i)
        .collect();
    SplitManifest {
        alpha: split.alpha,
        seed: split.seed,
        retained_edge_indices,
    }
}

/// Apply the holdout twice with the same rate: `G -> G' -> G''`.
///
/// Outer and inner rounds use sub-seeds `derive_seed(seed, 0)` (= `seed`)
/// and `derive_seed(seed, 1)`.
pub fn nested_split(graph: &Graph, alpha: f64, seed: u64) -> Result<NestedSplit> {
    let outer = sample_observed(graph, alpha, derive_seed(seed, TAG_OUTER))?;
    let inner_m = outer.observed.edge_count();
    if (alpha * inner_m as f64).round() as usize == 0 {
        return Err(Error::Degenerate(format!(
            "inner split would retain zero of {inner_m} edges"
        )));
    }
    let inner = sample_observed(&outer.observed, alpha, derive_seed(seed, TAG_INNER))?;
    Ok(NestedSplit { outer, inner })
}

/// Independent holdout variants with sub-seeds `derive_seed(seed, i)`.
///
/// Variant 0 coincides with `sample_observed(graph, alpha, seed)`.
pub fn generate_variants(
    graph: &Graph,
    alpha: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<HoldoutSplit>> {
    if count == 0 {
        return Err(Error::InvalidArgument("variant count must be >= 1".into()));
    }
    (0..count)
        .map(|i| sample_observed(graph, alpha, derive_seed(seed, i as u64)))
        .collect()
}

/// Uniform sample of non-edges of `graph`, capped at `cap`.
///
/// Returns every non-edge when there are at most `cap`; otherwise a uniform
/// sample without replacement of exactly `cap` distinct non-edges.
pub fn sample_negatives(graph: &Graph, cap: usize, seed: u64) -> Result<CandidatePairSet> {
    sample_negatives_excluding(graph, cap, seed, &[])
}

/// As [`sample_negatives`] but also excluding the given pairs (used to keep
/// evaluation negatives disjoint from known missing links).
pub fn sample_negatives_excluding(
    graph: &Graph,
    cap: usize,
    seed: u64,
    exclude: &[(usize, usize)],
) -> Result<CandidatePairSet> {
    if cap == 0 {
        return Err(Error::InvalidArgument("negative cap must be >= 1".into()));
    }
    let n = graph.node_count();
    let excluded: HashSet<(usize, usize)> = exclude
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    let available = graph
        .non_edge_count()
        .checked_sub(excluded.len())
        .unwrap_or(0);
    if graph.non_edge_count() == 0 {
        return Err(Error::Degenerate(
            "complete graph has no non-edges to sample".into(),
        ));
    }
    if available == 0 {
        return Err(Error::Degenerate(
            "no non-edges left after exclusions".into(),
        ));
    }

    let mut rng = rng::rng_from_seed(seed);
    let pairs = if available <= cap {
        graph
            .non_edges()
            .into_iter()
            .filter(|p| !excluded.contains(p))
            .collect()
    } else if graph.non_edge_count() <= 4 * cap || n < 64 {
        // small enough to materialize: uniform subset via partial shuffle
        let all: Vec<(usize, usize)> = graph
            .non_edges()
            .into_iter()
            .filter(|p| !excluded.contains(p))
            .collect();
        let idx = rng::sample_indices(&mut rng, all.len(), cap);
        let mut picked: Vec<(usize, usize)> = idx.into_iter().map(|i| all[i]).collect();
        picked.sort_unstable();
        picked
    } else {
        // sparse non-edge space relative to the cap: rejection sampling,
        // which is uniform over distinct non-edges
        let mut seen = HashSet::with_capacity(cap * 2);
        let mut picked = Vec::with_capacity(cap);
        while picked.len() < cap {
            let a = rng::uniform_usize(&mut rng, n);
            let b = rng::uniform_usize(&mut rng, n);
            if a == b {
                continue;
            }
            let p = (a.min(b), a.max(b));
            if graph.has_edge(p.0, p.1) || excluded.contains(&p) || !seen.insert(p) {
                continue;
            }
            picked.push(p);
        }
        picked.sort_unstable();
        picked
    };

    let set = CandidatePairSet::negatives(&pairs);
    debug_assert!(set.validate_against(graph).is_ok());
    Ok(set)
}
