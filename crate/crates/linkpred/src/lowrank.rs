//! Truncated low-rank decomposition of the adjacency matrix.
//!
//! The adjacency matrix is symmetric, so singular triplets are eigenpairs
//! ordered by eigenvalue magnitude: `sigma_k = |lambda_k|`, with the sign
//! absorbed into the right vector. The decomposition backs the `LRA`,
//! `dLRA` and `mLRA` pair predictors and their cheaper `*_approx` variants.

use crate::graph::Graph;
use crate::linalg::{orthonormalize_columns, symmetric_eigen, Mat};
use crate::rng;
use crate::scalar::Real;

/// Default rank of the main decomposition.
pub const DEFAULT_RANK: usize = 8;
/// Rank of the coarse decomposition behind the `*_approx` predictors.
pub const APPROX_RANK: usize = 4;
/// Power-iteration count of the coarse decomposition.
pub const APPROX_ITERS: usize = 5;

/// Above this size the exact decomposition switches from a dense eigensolve
/// to converged subspace iteration.
const DENSE_LIMIT: usize = 256;

/// Internal seed for the iterative start matrix; the decomposition is a pure
/// function of the graph.
const SUBSPACE_SEED: u64 = 0x10_0afd;

/// Rank-`r` symmetric decomposition `A ~ Q diag(lambda) Q^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEigen<F> {
    /// Signed eigenvalues, decreasing magnitude.
    values: Vec<F>,
    /// Eigenvectors as columns, `n x r`.
    vectors: Mat<F>,
}

impl<F: Real> TruncatedEigen<F> {
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Singular values (eigenvalue magnitudes), decreasing.
    pub fn singular_values(&self) -> Vec<F> {
        self.values.iter().map(|v| v.abs()).collect()
    }

    /// Entry `(i, j)` of the reconstructed matrix.
    pub fn entry(&self, i: usize, j: usize) -> F {
        let mut s = F::zero();
        for k in 0..self.values.len() {
            s += self.values[k] * self.vectors.get(i, k) * self.vectors.get(j, k);
        }
        s
    }

    /// Dot product of columns `i` and `j` of the reconstruction.
    ///
    /// With `A~ = Q L Q^T`, this is `(A~^T A~)_{ij} = Q L^2 Q^T`.
    pub fn column_dot(&self, i: usize, j: usize) -> F {
        let mut s = F::zero();
        for k in 0..self.values.len() {
            s += self.values[k] * self.values[k] * self.vectors.get(i, k) * self.vectors.get(j, k);
        }
        s
    }

    /// Mean reconstruction entry between each endpoint and the other
    /// endpoint's neighbors; zero when both neighborhoods are empty.
    pub fn neighbor_mean(&self, graph: &Graph, i: usize, j: usize) -> F {
        let ni = graph.neighbors(i);
        let nj = graph.neighbors(j);
        let total = ni.len() + nj.len();
        if total == 0 {
            return F::zero();
        }
        let mut s = F::zero();
        for &u in nj {
            s += self.entry(i, u);
        }
        for &v in ni {
            s += self.entry(v, j);
        }
        s / F::of_usize(total)
    }
}

/// Exact and coarse decompositions shared by all pairs of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankContext<F> {
    pub exact: TruncatedEigen<F>,
    pub approx: TruncatedEigen<F>,
}

/// Build the decomposition context for a graph.
///
/// `rank` is clamped to the node count. The exact part uses a dense
/// eigensolve for small graphs and converged subspace iteration otherwise;
/// the coarse part always runs [`APPROX_ITERS`] power iterations at rank
/// `min(APPROX_RANK, n)` from the first standard-basis columns.
pub fn low_rank_context<F: Real>(graph: &Graph, rank: usize) -> LowRankContext<F> {
    let n = graph.node_count();
    let rank = if rank > n {
        log::warn!("requested rank {rank} exceeds node count {n}; clamping");
        n
    } else {
        rank.max(1)
    };
    let exact = if n <= DENSE_LIMIT {
        dense_truncated(graph, rank)
    } else {
        subspace_iteration(graph, rank, 500, true)
    };
    let approx = subspace_iteration(graph, APPROX_RANK.min(n), APPROX_ITERS, false);
    LowRankContext { exact, approx }
}

fn dense_adjacency<F: Real>(graph: &Graph) -> Mat<F> {
    let n = graph.node_count();
    let mut a = Mat::zeros(n, n);
    for &(i, j) in graph.edges() {
        a.set(i, j, F::one());
        a.set(j, i, F::one());
    }
    a
}

fn dense_truncated<F: Real>(graph: &Graph, rank: usize) -> TruncatedEigen<F> {
    let a = dense_adjacency::<F>(graph);
    let (vals, vecs) = symmetric_eigen(&a);
    let n = graph.node_count();
    let mut vectors = Mat::zeros(n, rank);
    for k in 0..rank {
        for r in 0..n {
            vectors.set(r, k, vecs.get(r, k));
        }
    }
    TruncatedEigen {
        values: vals[..rank].to_vec(),
        vectors,
    }
}

/// Apply the sparse adjacency to each column of `q`.
fn apply_adjacency<F: Real>(graph: &Graph, q: &Mat<F>) -> Mat<F> {
    let n = graph.node_count();
    let mut out = Mat::zeros(n, q.cols());
    for v in 0..n {
        for &u in graph.neighbors(v) {
            for c in 0..q.cols() {
                let add = q.get(u, c);
                let cur = out.get(v, c);
                out.set(v, c, cur + add);
            }
        }
    }
    out
}

/// Subspace iteration on the adjacency matrix.
///
/// `converge == false` runs the documented coarse scheme, reproducible by
/// any implementation: start from the first `rank` standard-basis columns,
/// repeat `Q <- mgs(A Q)` exactly `iters` times (`mgs` is modified
/// Gram-Schmidt zeroing numerically dependent columns), then take the
/// Rayleigh-Ritz eigenpairs of `Q^T A Q`. `converge == true` starts from a
/// seeded random matrix instead and stops once the Ritz values settle.
fn subspace_iteration<F: Real>(
    graph: &Graph,
    rank: usize,
    iters: usize,
    converge: bool,
) -> TruncatedEigen<F> {
    let n = graph.node_count();
    let mut q = Mat::zeros(n, rank);
    if converge {
        let mut r = rng::rng_from_seed(SUBSPACE_SEED);
        for c in 0..rank {
            for row in 0..n {
                q.set(row, c, F::of_f64(rng::uniform_f64(&mut r) - 0.5));
            }
        }
    } else {
        for c in 0..rank.min(n) {
            q.set(c, c, F::one());
        }
    }
    orthonormalize_columns(&mut q);

    let mut prev: Option<Vec<F>> = None;
    for _ in 0..iters {
        let aq = apply_adjacency(graph, &q);
        q = aq;
        orthonormalize_columns(&mut q);
        if converge {
            let ritz = ritz_values(graph, &q);
            if let Some(p) = &prev {
                let max_delta = ritz
                    .iter()
                    .zip(p)
                    .map(|(a, b)| (*a - *b).abs())
                    .fold(F::zero(), F::max);
                let scale = ritz.iter().map(|v| v.abs()).fold(F::one(), F::max);
                if max_delta <= F::of_f64(1e-12) * scale {
                    break;
                }
            }
            prev = Some(ritz);
        }
    }

    let (values, vectors) = ritz_pairs(graph, &q);
    TruncatedEigen { values, vectors }
}

/// Ritz values of the projected operator `Q^T A Q`, decreasing magnitude.
fn ritz_values<F: Real>(graph: &Graph, q: &Mat<F>) -> Vec<F> {
    let aq = apply_adjacency(graph, q);
    let b = q.transpose_matmul(&aq);
    symmetric_eigen(&b).0
}

/// Rayleigh-Ritz extraction: eigenpairs of `Q^T A Q` mapped back through `Q`.
fn ritz_pairs<F: Real>(graph: &Graph, q: &Mat<F>) -> (Vec<F>, Mat<F>) {
    let n = graph.node_count();
    let rank = q.cols();
    let aq = apply_adjacency(graph, q);
    let b = q.transpose_matmul(&aq);
    let (bvals, bvecs) = symmetric_eigen(&b);
    let mut vectors = Mat::zeros(n, rank);
    for k in 0..rank {
        for row in 0..n {
            let mut s = F::zero();
            for c in 0..rank {
                s += q.get(row, c) * bvecs.get(c, k);
            }
            vectors.set(row, k, s);
        }
    }
    (bvals, vectors)
}
