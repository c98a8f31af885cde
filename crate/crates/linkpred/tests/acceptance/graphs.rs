//! Graph generators for the acceptance sweeps.

use linkpred::graph::Graph;
use linkpred::rng::{self, rng_from_seed};

/// Every connected labeled simple graph on `n` nodes (covers all
/// isomorphism classes, with repetition across labelings).
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << slots.len()) {
        let edges: Vec<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        if is_connected(&g) {
            out.push(g);
        }
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    g.node_count() == 1
        || g.bfs_distances(0)
            .iter()
            .all(|&d| d != usize::MAX)
}

/// Random connected graph with edge probability drawn per graph.
pub fn random_connected_graph(n: usize, seed: u64) -> Graph {
    let mut r = rng_from_seed(seed);
    loop {
        let p = 0.2 + 0.6 * rng::uniform_f64(&mut r);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng::uniform_f64(&mut r) < p {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        if g.edge_count() >= 1 && is_connected(&g) {
            return g;
        }
    }
}

/// Random simple graph with exactly `m` edges.
pub fn random_graph_exact_m(n: usize, m: usize, seed: u64) -> Graph {
    let mut r = rng_from_seed(seed);
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
    Graph::from_edges(n, &edges).unwrap()
}
