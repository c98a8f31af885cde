//! Node-level predictors: centralities, clustering, neighbor statistics.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::scalar::Real;

use super::global::local_clustering;

/// Damping factor shared by PageRank and personalized PageRank.
pub const PAGERANK_DAMPING: f64 = 0.85;
/// Katz attenuation as a fraction of the spectral radius.
pub const KATZ_ATTENUATION_FRACTION: f64 = 0.9;
/// Katz fixed-point tolerance.
pub const KATZ_TOL: f64 = 1e-8;
/// Katz iteration cap.
pub const KATZ_MAX_ITERS: usize = 1000;

const PAGERANK_TOL: f64 = 1e-13;
const PAGERANK_MAX_ITERS: usize = 10_000;
const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITERS: usize = 100_000;

/// The ten per-node predictors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures<F> {
    /// Local clustering coefficient.
    pub clustering: F,
    /// Average neighbor degree.
    pub avg_neighbor_degree: F,
    /// Shortest-path betweenness, unnormalized pair counts.
    pub betweenness: F,
    /// Closeness (Wasserman-Faust scaling, 0 for isolated nodes).
    pub closeness: F,
    /// Degree divided by `n - 1`.
    pub degree_centrality: F,
    /// Eigenvector centrality, unit Euclidean norm.
    pub eigenvector: F,
    /// Katz centrality, unit Euclidean norm.
    pub katz: F,
    /// Number of triangles through the node.
    pub triangles: F,
    /// PageRank (sums to one over the graph).
    pub pagerank: F,
    /// Load centrality, unnormalized pair counts.
    pub load: F,
}

impl<F: Real> NodeFeatures<F> {
    pub fn as_row(&self) -> [F; 10] {
        [
            self.clustering,
            self.avg_neighbor_degree,
            self.betweenness,
            self.closeness,
            self.degree_centrality,
            self.eigenvector,
            self.katz,
            self.triangles,
            self.pagerank,
            self.load,
        ]
    }
}

/// All node predictors for every node, computed in one pass per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFeatureTable<F> {
    rows: Vec<NodeFeatures<F>>,
}

impl<F: Real> NodeFeatureTable<F> {
    pub fn compute(graph: &Graph) -> Self {
        let n = graph.node_count();
        let lcc = local_clustering::<F>(graph);
        let tri = graph.triangles_per_node();
        let between = betweenness(graph);
        let load = load_centrality(graph);
        let close = closeness(graph);
        let eigen = eigenvector_centrality(graph);
        let katz = katz_centrality(graph);
        let pr = pagerank(graph, None);

        let rows = (0..n)
            .map(|v| {
                let k = graph.degree(v);
                let and = if k == 0 {
                    F::zero()
                } else {
                    graph
                        .neighbors(v)
                        .iter()
                        .map(|&u| F::of_usize(graph.degree(u)))
                        .sum::<F>()
                        / F::of_usize(k)
                };
                NodeFeatures {
                    clustering: lcc[v],
                    avg_neighbor_degree: and,
                    betweenness: between[v],
                    closeness: close[v],
                    degree_centrality: if n > 1 {
                        F::of_usize(k) / F::of_usize(n - 1)
                    } else {
                        F::zero()
                    },
                    eigenvector: eigen[v],
                    katz: katz[v],
                    triangles: F::of_usize(tri[v]),
                    pagerank: pr[v],
                    load: load[v],
                }
            })
            .collect();
        NodeFeatureTable { rows }
    }

    pub fn get(&self, v: usize) -> &NodeFeatures<F> {
        &self.rows[v]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// All ten predictors for a single node. Convenience wrapper that computes
/// the whole table; use [`NodeFeatureTable`] when many nodes are needed.
pub fn node_features<F: Real>(graph: &Graph, v: usize) -> NodeFeatures<F> {
    *NodeFeatureTable::compute(graph).get(v)
}

/// Brandes betweenness centrality, unnormalized unordered pair counts.
pub fn betweenness<F: Real>(graph: &Graph) -> Vec<F> {
    let n = graph.node_count();
    let mut bc = vec![F::zero(); n];
    let mut sigma = vec![F::zero(); n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![F::zero(); n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];

    for s in 0..n {
        for v in 0..n {
            sigma[v] = F::zero();
            dist[v] = usize::MAX;
            delta[v] = F::zero();
            preds[v].clear();
        }
        sigma[s] = F::one();
        dist[s] = 0;
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in graph.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
                if dist[u] == dist[v] + 1 {
                    sigma[u] = sigma[u] + sigma[v];
                    preds[u].push(v);
                }
            }
        }
        for &v in order.iter().rev() {
            for &p in &preds[v] {
                let share = sigma[p] / sigma[v] * (F::one() + delta[v]);
                delta[p] += share;
            }
            if v != s {
                bc[v] += delta[v];
            }
        }
    }
    for v in bc.iter_mut() {
        *v = *v / F::of_f64(2.0);
    }
    bc
}

/// Load centrality, unnormalized unordered pair counts.
///
/// Unit flows aimed at each source split equally among shortest-path
/// predecessors at every hop (Newman's load, not path-count betweenness).
pub fn load_centrality<F: Real>(graph: &Graph) -> Vec<F> {
    let n = graph.node_count();
    let mut load = vec![F::zero(); n];
    for s in 0..n {
        let dist = graph.bfs_distances(s);
        let mut order: Vec<usize> = (0..n).filter(|&v| dist[v] != usize::MAX).collect();
        order.sort_by_key(|&v| dist[v]);
        let mut between = vec![F::one(); n];
        for &v in order.iter().rev() {
            if v == s {
                continue;
            }
            let preds: Vec<usize> = graph
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| dist[u] + 1 == dist[v])
                .collect();
            let share = between[v] / F::of_usize(preds.len());
            for u in preds {
                between[u] += share;
            }
        }
        for &v in &order {
            if v != s {
                load[v] += between[v] - F::one();
            }
        }
    }
    for v in load.iter_mut() {
        *v = *v / F::of_f64(2.0);
    }
    load
}

/// Closeness with the Wasserman-Faust correction for disconnected graphs:
/// `((r-1)/(n-1)) * ((r-1)/sum_d)` over the `r` nodes reachable from `v`.
pub fn closeness<F: Real>(graph: &Graph) -> Vec<F> {
    let n = graph.node_count();
    (0..n)
        .map(|v| {
            let dist = graph.bfs_distances(v);
            let mut reach = 0usize;
            let mut total = 0usize;
            for &d in &dist {
                if d != usize::MAX {
                    reach += 1;
                    total += d;
                }
            }
            if reach <= 1 || total == 0 || n <= 1 {
                F::zero()
            } else {
                let r1 = F::of_usize(reach - 1);
                (r1 / F::of_usize(n - 1)) * (r1 / F::of_usize(total))
            }
        })
        .collect()
}

/// Eigenvector centrality by power iteration on `A + I` from the uniform
/// vector, normalized to unit Euclidean norm.
///
/// The identity shift keeps bipartite graphs from oscillating without
/// changing the dominant eigenvector.
pub fn eigenvector_centrality<F: Real>(graph: &Graph) -> Vec<F> {
    let n = graph.node_count();
    let mut x = vec![F::one() / F::of_usize(n).sqrt(); n];
    let mut next = vec![F::zero(); n];
    for _ in 0..EIGEN_MAX_ITERS {
        for v in 0..n {
            let mut s = x[v]; // self-loop from the +I shift
            for &u in graph.neighbors(v) {
                s += x[u];
            }
            next[v] = s;
        }
        let norm = next.iter().map(|&v| v * v).sum::<F>().sqrt();
        if norm > F::zero() {
            for v in next.iter_mut() {
                *v = *v / norm;
            }
        }
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (*a - *b).abs())
            .fold(F::zero(), F::max);
        std::mem::swap(&mut x, &mut next);
        if delta <= F::of_f64(EIGEN_TOL) {
            break;
        }
    }
    x
}

/// Spectral radius of the adjacency matrix via the `A + I` power iteration.
pub fn spectral_radius<F: Real>(graph: &Graph) -> F {
    let x = eigenvector_centrality::<F>(graph);
    // Rayleigh quotient of A at the converged vector
    let mut ax = vec![F::zero(); graph.node_count()];
    for v in 0..graph.node_count() {
        for &u in graph.neighbors(v) {
            ax[v] += x[u];
        }
    }
    let num: F = x.iter().zip(&ax).map(|(a, b)| *a * *b).sum();
    let den: F = x.iter().map(|&v| v * v).sum();
    if den > F::zero() {
        (num / den).max(F::zero())
    } else {
        F::zero()
    }
}

/// Katz centrality: fixed point of `x = beta * A x + 1` with
/// `beta = 0.9 / lambda_max`, normalized to unit Euclidean norm.
pub fn katz_centrality<F: Real>(graph: &Graph) -> Vec<F> {
    let n = graph.node_count();
    let lambda = spectral_radius::<F>(graph);
    let beta = if lambda > F::of_f64(1e-12) {
        F::of_f64(KATZ_ATTENUATION_FRACTION) / lambda
    } else {
        F::zero()
    };
    let mut x = vec![F::one(); n];
    let mut next = vec![F::zero(); n];
    for _ in 0..KATZ_MAX_ITERS {
        for v in 0..n {
            let mut s = F::zero();
            for &u in graph.neighbors(v) {
                s += x[u];
            }
            next[v] = beta * s + F::one();
        }
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (*a - *b).abs())
            .fold(F::zero(), F::max);
        std::mem::swap(&mut x, &mut next);
        if delta <= F::of_f64(KATZ_TOL) {
            break;
        }
    }
    let norm = x.iter().map(|&v| v * v).sum::<F>().sqrt();
    if norm > F::zero() {
        for v in x.iter_mut() {
            *v = *v / norm;
        }
    }
    x
}

/// PageRank with uniform teleport, or personalized PageRank when a restart
/// node is given (teleport and dangling mass both go to the restart vector).
pub fn pagerank<F: Real>(graph: &Graph, restart: Option<usize>) -> Vec<F> {
    let n = graph.node_count();
    let d = F::of_f64(PAGERANK_DAMPING);
    let teleport: Vec<F> = match restart {
        Some(r) => (0..n)
            .map(|v| if v == r { F::one() } else { F::zero() })
            .collect(),
        None => vec![F::one() / F::of_usize(n); n],
    };
    let mut x = teleport.clone();
    let mut next = vec![F::zero(); n];
    for _ in 0..PAGERANK_MAX_ITERS {
        let dangling: F = (0..n)
            .filter(|&v| graph.degree(v) == 0)
            .map(|v| x[v])
            .sum();
        for v in 0..n {
            let mut s = F::zero();
            for &u in graph.neighbors(v) {
                s += x[u] / F::of_usize(graph.degree(u));
            }
            next[v] = d * (s + dangling * teleport[v]) + (F::one() - d) * teleport[v];
        }
        let delta: F = x.iter().zip(&next).map(|(a, b)| (*a - *b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if delta <= F::of_f64(PAGERANK_TOL) {
            break;
        }
    }
    x
}
