//! Pair-level predictors for unconnected node pairs.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::lowrank::LowRankContext;
use crate::scalar::Real;

use super::node::pagerank;

/// The fourteen pair predictors.
///
/// All fields are symmetric in `(i, j)`; the personalized PageRank entry is
/// the mean of the two directed values so the whole row respects pair
/// symmetry. Unreachable pairs get shortest-path sentinel `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFeatures<F> {
    pub common_neighbors: F,
    pub shortest_path: F,
    pub lhn: F,
    pub personalized_pagerank: F,
    pub preferential_attachment: F,
    pub jaccard: F,
    pub adamic_adar: F,
    pub resource_allocation: F,
    pub lra: F,
    pub lra_dot: F,
    pub lra_neighbor_mean: F,
    pub lra_approx: F,
    pub lra_dot_approx: F,
    pub lra_neighbor_mean_approx: F,
}

impl<F: Real> PairFeatures<F> {
    pub fn as_row(&self) -> [F; 14] {
        [
            self.common_neighbors,
            self.shortest_path,
            self.lhn,
            self.personalized_pagerank,
            self.preferential_attachment,
            self.jaccard,
            self.adamic_adar,
            self.resource_allocation,
            self.lra,
            self.lra_dot,
            self.lra_neighbor_mean,
            self.lra_approx,
            self.lra_dot_approx,
            self.lra_neighbor_mean_approx,
        ]
    }
}

/// Compute all pair predictors given precomputed personalized PageRank
/// vectors for both endpoints.
pub(crate) fn pair_features_with_ppr<F: Real>(
    graph: &Graph,
    i: usize,
    j: usize,
    lra: &LowRankContext<F>,
    ppr_i: &[F],
    ppr_j: &[F],
) -> PairFeatures<F> {
    let n = graph.node_count();
    let ki = graph.degree(i);
    let kj = graph.degree(j);
    let common = graph.common_neighbors(i, j);
    let cn = common.len();

    let sp = {
        let d = graph.bfs_distances(i)[j];
        if d == usize::MAX {
            F::of_usize(n)
        } else {
            F::of_usize(d)
        }
    };

    let union = ki + kj - cn;
    let jaccard = if union == 0 {
        F::zero()
    } else {
        F::of_usize(cn) / F::of_usize(union)
    };

    let lhn = if ki == 0 || kj == 0 {
        F::zero()
    } else {
        F::of_usize(cn) / F::of_usize(ki * kj)
    };

    // a common neighbor has degree >= 2 by construction, so ln(k) > 0;
    // the guard only matters for hypothetical degenerate inputs
    let mut adamic_adar = F::zero();
    let mut resource_allocation = F::zero();
    for &z in &common {
        let kz = graph.degree(z);
        if kz > 1 {
            adamic_adar += F::one() / F::of_usize(kz).ln();
        }
        if kz > 0 {
            resource_allocation += F::one() / F::of_usize(kz);
        }
    }

    let half = F::of_f64(0.5);
    PairFeatures {
        common_neighbors: F::of_usize(cn),
        shortest_path: sp,
        lhn,
        personalized_pagerank: (ppr_i[j] + ppr_j[i]) * half,
        preferential_attachment: F::of_usize(ki) * F::of_usize(kj),
        jaccard,
        adamic_adar,
        resource_allocation,
        lra: lra.exact.entry(i, j),
        lra_dot: lra.exact.column_dot(i, j),
        lra_neighbor_mean: lra.exact.neighbor_mean(graph, i, j),
        lra_approx: lra.approx.entry(i, j),
        lra_dot_approx: lra.approx.column_dot(i, j),
        lra_neighbor_mean_approx: lra.approx.neighbor_mean(graph, i, j),
    }
}

/// All pair predictors for one unconnected pair.
pub fn pair_features<F: Real>(
    graph: &Graph,
    i: usize,
    j: usize,
    lra: &LowRankContext<F>,
) -> PairFeatures<F> {
    let ppr_i = pagerank(graph, Some(i));
    let ppr_j = pagerank(graph, Some(j));
    pair_features_with_ppr(graph, i, j, lra, &ppr_i, &ppr_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowrank::low_rank_context;

    #[test]
    fn path_endpoints() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let ctx = low_rank_context::<f64>(&p3, 3);
        let f = pair_features(&p3, 0, 2, &ctx);
        assert_eq!(f.common_neighbors, 1.0);
        assert_eq!(f.jaccard, 1.0);
        assert_eq!(f.preferential_attachment, 1.0);
        assert_eq!(f.shortest_path, 2.0);
        assert_eq!(f.lhn, 1.0);
        // single common neighbor of degree 2
        assert!((f.adamic_adar - 1.0 / 2.0_f64.ln()).abs() < 1e-12);
        assert!((f.resource_allocation - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disconnected_pair_sentinels() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let ctx = low_rank_context::<f64>(&g, 4);
        let f = pair_features(&g, 0, 2, &ctx);
        assert_eq!(f.shortest_path, 4.0); // sentinel n
        assert_eq!(f.common_neighbors, 0.0);
        assert_eq!(f.jaccard, 0.0);
    }

    #[test]
    fn worked_five_node_example() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let ctx = low_rank_context::<f64>(&g, 5);
        let f = pair_features(&g, 0, 4, &ctx);
        assert_eq!(f.common_neighbors, 0.0);
        assert_eq!(f.preferential_attachment, 2.0); // deg(0)=2, deg(4)=1
        assert_eq!(f.shortest_path, 3.0); // 0-1-3-4
        assert_eq!(f.adamic_adar, 0.0);
        assert_eq!(f.resource_allocation, 0.0);
        assert_eq!(f.jaccard, 0.0);
    }

    #[test]
    fn symmetric_in_pair_order() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (1, 4)]).unwrap();
        let ctx = low_rank_context::<f64>(&g, 6);
        for &(i, j) in &[(0usize, 5usize), (2, 3), (0, 4)] {
            let a = pair_features(&g, i, j, &ctx);
            let b = pair_features(&g, j, i, &ctx);
            for (x, y) in a.as_row().iter().zip(b.as_row().iter()) {
                assert!((*x - *y).abs() < 1e-12, "asymmetry at pair ({i},{j})");
            }
        }
    }

    #[test]
    fn adding_shared_neighbor_never_decreases_cn() {
        let g = Graph::from_edges(5, &[(0, 2), (1, 3)]).unwrap();
        let ctx = low_rank_context::<f64>(&g, 5);
        let before = pair_features(&g, 0, 1, &ctx).common_neighbors;
        let g2 = Graph::from_edges(5, &[(0, 2), (1, 3), (0, 4), (1, 4)]).unwrap();
        let ctx2 = low_rank_context::<f64>(&g2, 5);
        let after = pair_features(&g2, 0, 1, &ctx2).common_neighbors;
        assert!(after >= before);
    }
}
