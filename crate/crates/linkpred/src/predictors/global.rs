//! Whole-network context features.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::scalar::{mean, population_variance, Real};

/// The eight network-level predictors.
///
/// Undefined quantities use neutral sentinels: assortativity is 0 when the
/// endpoint degrees have no variance, transitivity is 0 when there are no
/// wedges, and the diameter is the largest *finite* hop distance (0 for an
/// edgeless graph).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalFeatures<F> {
    pub node_count: F,
    pub observed_edges: F,
    pub avg_degree: F,
    pub degree_variance: F,
    pub diameter: F,
    pub assortativity: F,
    pub transitivity: F,
    pub avg_clustering: F,
}

impl<F: Real> GlobalFeatures<F> {
    pub fn as_row(&self) -> [F; 8] {
        [
            self.node_count,
            self.observed_edges,
            self.avg_degree,
            self.degree_variance,
            self.diameter,
            self.assortativity,
            self.transitivity,
            self.avg_clustering,
        ]
    }
}

/// Local clustering coefficient of every node (0 for degree < 2).
pub fn local_clustering<F: Real>(graph: &Graph) -> Vec<F> {
    let tri = graph.triangles_per_node();
    (0..graph.node_count())
        .map(|v| {
            let k = graph.degree(v);
            if k < 2 {
                F::zero()
            } else {
                F::of_usize(2 * tri[v]) / F::of_usize(k * (k - 1))
            }
        })
        .collect()
}

/// Largest finite hop distance in the graph.
pub fn diameter(graph: &Graph) -> usize {
    let mut best = 0usize;
    for s in 0..graph.node_count() {
        for d in graph.bfs_distances(s) {
            if d != usize::MAX && d > best {
                best = d;
            }
        }
    }
    best
}

/// Pearson correlation of degrees across edge endpoints (both orientations).
/// Returns 0 when either endpoint-degree sequence is constant.
pub fn degree_assortativity<F: Real>(graph: &Graph) -> F {
    if graph.edge_count() == 0 {
        return F::zero();
    }
    let mut xs: Vec<F> = Vec::with_capacity(2 * graph.edge_count());
    let mut ys: Vec<F> = Vec::with_capacity(2 * graph.edge_count());
    for &(i, j) in graph.edges() {
        let ki = F::of_usize(graph.degree(i));
        let kj = F::of_usize(graph.degree(j));
        xs.push(ki);
        ys.push(kj);
        xs.push(kj);
        ys.push(ki);
    }
    let mx = mean(&xs);
    let my = mean(&ys);
    let mut cov = F::zero();
    let mut vx = F::zero();
    let mut vy = F::zero();
    for (x, y) in xs.iter().zip(&ys) {
        cov += (*x - mx) * (*y - my);
        vx += (*x - mx) * (*x - mx);
        vy += (*y - my) * (*y - my);
    }
    if vx <= F::zero() || vy <= F::zero() {
        return F::zero();
    }
    cov / (vx.sqrt() * vy.sqrt())
}

/// Transitivity: 3 * triangles / wedges; 0 when the graph has no wedges.
pub fn transitivity<F: Real>(graph: &Graph) -> F {
    let tri = graph.triangles_per_node();
    let triangles = tri.iter().sum::<usize>(); // each triangle counted 3x
    let wedges: usize = (0..graph.node_count())
        .map(|v| {
            let k = graph.degree(v);
            k * k.saturating_sub(1) / 2
        })
        .sum();
    if wedges == 0 {
        F::zero()
    } else {
        F::of_usize(triangles) / F::of_usize(wedges)
    }
}

/// Compute all eight global predictors of the observed network.
pub fn global_features<F: Real>(graph: &Graph) -> GlobalFeatures<F> {
    let n = graph.node_count();
    let m = graph.edge_count();
    let degrees: Vec<F> = (0..n).map(|v| F::of_usize(graph.degree(v))).collect();
    let lcc = local_clustering::<F>(graph);
    GlobalFeatures {
        node_count: F::of_usize(n),
        observed_edges: F::of_usize(m),
        avg_degree: F::of_usize(2 * m) / F::of_usize(n),
        degree_variance: population_variance(&degrees),
        diameter: F::of_usize(diameter(graph)),
        assortativity: degree_assortativity(graph),
        transitivity: transitivity(graph),
        avg_clustering: mean(&lcc),
    }
}
