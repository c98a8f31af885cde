//! Naive reference implementations of all 42 predictors.
//!
//! Everything here is written against a dense adjacency matrix with
//! independent algorithms: Floyd-Warshall distances, per-pair shortest-path
//! counting, recursive flow splitting, dense eigensolves and SVD through
//! nalgebra, and linear-system PageRank. Shared conventions (sentinels,
//! normalizations) follow the library's documented contracts.

use linkpred::graph::Graph;
use nalgebra::{DMatrix, DVector};

pub struct DenseGraph {
    pub n: usize,
    pub a: Vec<Vec<f64>>,
    pub deg: Vec<usize>,
}

impl DenseGraph {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut a = vec![vec![0.0; n]; n];
        for &(i, j) in g.edges() {
            a[i][j] = 1.0;
            a[j][i] = 1.0;
        }
        let deg = (0..n)
            .map(|v| a[v].iter().filter(|&&x| x > 0.0).count())
            .collect();
        DenseGraph { n, a, deg }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.a[i][j])
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.a[v][u] > 0.0).collect()
    }
}

/// All-pairs hop distances by Floyd-Warshall; `usize::MAX` if unreachable.
pub fn distances(g: &DenseGraph) -> Vec<Vec<usize>> {
    const INF: usize = usize::MAX / 4;
    let n = g.n;
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if g.a[i][j] > 0.0 {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.iter_mut()
        .for_each(|row| row.iter_mut().for_each(|v| {
            if *v >= INF {
                *v = usize::MAX;
            }
        }));
    d
}

fn triangles_through(g: &DenseGraph, v: usize) -> usize {
    let mut count = 0;
    for i in 0..g.n {
        for j in (i + 1)..g.n {
            if i != v && j != v && g.a[v][i] > 0.0 && g.a[v][j] > 0.0 && g.a[i][j] > 0.0 {
                count += 1;
            }
        }
    }
    count
}

pub fn local_clustering(g: &DenseGraph, v: usize) -> f64 {
    let k = g.deg[v];
    if k < 2 {
        0.0
    } else {
        2.0 * triangles_through(g, v) as f64 / (k * (k - 1)) as f64
    }
}

// ---- global predictors ----

pub fn global_row(g: &DenseGraph, dist: &[Vec<usize>]) -> [f64; 8] {
    let n = g.n as f64;
    let m: f64 = g.deg.iter().sum::<usize>() as f64 / 2.0;
    let mean_deg = g.deg.iter().sum::<usize>() as f64 / n;
    let var_deg = g
        .deg
        .iter()
        .map(|&k| (k as f64 - mean_deg).powi(2))
        .sum::<f64>()
        / n;
    let diameter = dist
        .iter()
        .flatten()
        .filter(|&&d| d != usize::MAX)
        .map(|&d| d)
        .max()
        .unwrap_or(0) as f64;

    // assortativity over both edge orientations
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..g.n {
        for j in 0..g.n {
            if g.a[i][j] > 0.0 {
                xs.push(g.deg[i] as f64);
                ys.push(g.deg[j] as f64);
            }
        }
    }
    let da = if xs.is_empty() {
        0.0
    } else {
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if vx <= 0.0 || vy <= 0.0 {
            0.0
        } else {
            cov / (vx.sqrt() * vy.sqrt())
        }
    };

    let total_triangles: usize = (0..g.n).map(|v| triangles_through(g, v)).sum();
    let wedges: usize = g.deg.iter().map(|&k| k * k.saturating_sub(1) / 2).sum();
    let nt = if wedges == 0 {
        0.0
    } else {
        total_triangles as f64 / wedges as f64
    };
    let acc = (0..g.n).map(|v| local_clustering(g, v)).sum::<f64>() / n;

    [n, m, 2.0 * m / n, var_deg, diameter, da, nt, acc]
}

// ---- node predictors ----

/// Number of shortest s->t paths, by memoized recursion on the BFS DAG.
fn path_counts(g: &DenseGraph, dist: &[Vec<usize>], s: usize) -> Vec<f64> {
    // sigma[x] = number of shortest paths s -> x
    let n = g.n;
    let mut order: Vec<usize> = (0..n).filter(|&x| dist[s][x] != usize::MAX).collect();
    order.sort_by_key(|&x| dist[s][x]);
    let mut sigma = vec![0.0; n];
    sigma[s] = 1.0;
    for &x in &order {
        if x == s {
            continue;
        }
        for y in g.neighbors(x) {
            if dist[s][y] != usize::MAX && dist[s][y] + 1 == dist[s][x] {
                sigma[x] += sigma[y];
            }
        }
    }
    sigma
}

/// Betweenness from the pair-counting identity
/// `sum_{s<t} sigma_sv * sigma_vt / sigma_st` over pairs with
/// `d(s,v)+d(v,t) = d(s,t)`.
pub fn betweenness(g: &DenseGraph, dist: &[Vec<usize>]) -> Vec<f64> {
    let n = g.n;
    let sigma: Vec<Vec<f64>> = (0..n).map(|s| path_counts(g, dist, s)).collect();
    let mut out = vec![0.0; n];
    for v in 0..n {
        for s in 0..n {
            for t in (s + 1)..n {
                if s == v || t == v || dist[s][t] == usize::MAX {
                    continue;
                }
                if dist[s][v] != usize::MAX
                    && dist[v][t] != usize::MAX
                    && dist[s][v] + dist[v][t] == dist[s][t]
                {
                    out[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    out
}

/// Load of `v` for one ordered pair (source, target): recursive equal
/// splitting of a unit flow among shortest-path next hops.
fn load_flow(
    g: &DenseGraph,
    dist: &[Vec<usize>],
    at: usize,
    target: usize,
    amount: f64,
    out: &mut [f64],
) {
    if at == target {
        return;
    }
    out[at] += amount;
    let next: Vec<usize> = g
        .neighbors(at)
        .into_iter()
        .filter(|&u| dist[u][target] != usize::MAX && dist[u][target] + 1 == dist[at][target])
        .collect();
    let share = amount / next.len() as f64;
    for u in next {
        load_flow(g, dist, u, target, share, out);
    }
}

pub fn load_centrality(g: &DenseGraph, dist: &[Vec<usize>]) -> Vec<f64> {
    let n = g.n;
    let mut load = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == usize::MAX {
                continue;
            }
            let mut through = vec![0.0; n];
            load_flow(g, dist, s, t, 1.0, &mut through);
            through[s] = 0.0; // endpoints excluded
            for v in 0..n {
                load[v] += through[v];
            }
        }
    }
    load.iter_mut().for_each(|v| *v /= 2.0);
    load
}

pub fn closeness(g: &DenseGraph, dist: &[Vec<usize>], v: usize) -> f64 {
    let mut reach = 0usize;
    let mut total = 0usize;
    for t in 0..g.n {
        if dist[v][t] != usize::MAX {
            reach += 1;
            total += dist[v][t];
        }
    }
    if reach <= 1 || total == 0 || g.n <= 1 {
        0.0
    } else {
        let r1 = (reach - 1) as f64;
        (r1 / (g.n - 1) as f64) * (r1 / total as f64)
    }
}

/// Dominant eigenvector by dense eigensolve, unit norm, positive.
pub fn eigenvector(g: &DenseGraph) -> Vec<f64> {
    let eig = nalgebra::SymmetricEigen::new(g.matrix());
    let mut top = 0usize;
    for i in 0..g.n {
        if eig.eigenvalues[i] > eig.eigenvalues[top] {
            top = i;
        }
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|x| *x = *x * sign / norm);
    v
}

pub fn spectral_radius(g: &DenseGraph) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(g.matrix());
    eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()))
}

/// Katz by truncated Neumann series of matrix powers, unit norm.
pub fn katz(g: &DenseGraph) -> Vec<f64> {
    let lambda = spectral_radius(g);
    let beta = if lambda > 1e-12 { 0.9 / lambda } else { 0.0 };
    let a = g.matrix();
    let ones = DVector::from_element(g.n, 1.0);
    let mut x = ones.clone();
    let mut term = ones;
    for _ in 0..100_000 {
        term = beta * (&a * &term);
        x += &term;
        if term.amax() < 1e-14 {
            break;
        }
    }
    let norm = x.norm();
    x.iter().map(|v| v / norm).collect()
}

/// PageRank by direct linear solve of
/// `x = (1-d) p + d (W + p 1_dangling^T) x`.
pub fn pagerank(g: &DenseGraph, restart: Option<usize>) -> Vec<f64> {
    let n = g.n;
    let d = 0.85;
    let p: Vec<f64> = match restart {
        Some(r) => (0..n).map(|v| if v == r { 1.0 } else { 0.0 }).collect(),
        None => vec![1.0 / n as f64; n],
    };
    let mut w = DMatrix::zeros(n, n);
    for u in 0..n {
        if g.deg[u] == 0 {
            for v in 0..n {
                w[(v, u)] = p[v];
            }
        } else {
            for v in 0..n {
                if g.a[u][v] > 0.0 {
                    w[(v, u)] = 1.0 / g.deg[u] as f64;
                }
            }
        }
    }
    let system = DMatrix::identity(n, n) - d * w;
    let rhs = DVector::from_iterator(n, p.iter().map(|v| v * (1.0 - d)));
    let sol = system.lu().solve(&rhs).expect("pagerank system solvable");
    sol.iter().copied().collect()
}

pub fn node_row(
    g: &DenseGraph,
    dist: &[Vec<usize>],
    between: &[f64],
    load: &[f64],
    ec: &[f64],
    kc: &[f64],
    pr: &[f64],
    v: usize,
) -> [f64; 10] {
    let k = g.deg[v];
    let and = if k == 0 {
        0.0
    } else {
        g.neighbors(v).iter().map(|&u| g.deg[u] as f64).sum::<f64>() / k as f64
    };
    [
        local_clustering(g, v),
        and,
        between[v],
        closeness(g, dist, v),
        if g.n > 1 {
            k as f64 / (g.n - 1) as f64
        } else {
            0.0
        },
        ec[v],
        kc[v],
        triangles_through(g, v) as f64,
        pr[v],
        load[v],
    ]
}

// ---- low-rank reference ----

pub struct LowRankOracle {
    /// Rank-r reconstruction via dense SVD, or None when the truncation is
    /// not unique (tied singular values at the cut).
    pub exact: Option<DMatrix<f64>>,
    /// Reconstruction of the documented coarse scheme.
    pub approx: DMatrix<f64>,
}

/// Modified Gram-Schmidt with the same zeroing rule the library documents:
/// a column whose residual is below 1e-9 of its original norm is zeroed.
fn mgs(m: &mut DMatrix<f64>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    for c in 0..cols {
        let original = m.column(c).norm();
        for prev in 0..c {
            let dot: f64 = (0..rows).map(|r| m[(r, c)] * m[(r, prev)]).sum();
            for r in 0..rows {
                m[(r, c)] -= dot * m[(r, prev)];
            }
        }
        let norm = m.column(c).norm();
        if norm > 1e-9 * original.max(1e-300) {
            for r in 0..rows {
                m[(r, c)] /= norm;
            }
        } else {
            for r in 0..rows {
                m[(r, c)] = 0.0;
            }
        }
    }
}

pub fn low_rank(g: &DenseGraph, rank: usize, approx_rank: usize, approx_iters: usize) -> LowRankOracle {
    let a = g.matrix();
    let rank = rank.min(g.n);

    // singular triplets of a symmetric matrix come from its eigenpairs:
    // sigma = |lambda| with the sign absorbed into the right vector
    // (nalgebra's general svd() mispairs u/v columns near-degenerate
    // sigmas on some adjacency matrices, so it is not used here)
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .partial_cmp(&eig.eigenvalues[i].abs())
            .unwrap()
    });
    let unique_cut = rank == g.n
        || eig.eigenvalues[order[rank - 1]].abs() - eig.eigenvalues[order[rank]].abs() > 1e-9;
    let exact = if unique_cut {
        let mut recon = DMatrix::zeros(g.n, g.n);
        for &k in order.iter().take(rank) {
            let q = eig.eigenvectors.column(k);
            for i in 0..g.n {
                for j in 0..g.n {
                    recon[(i, j)] += eig.eigenvalues[k] * q[i] * q[j];
                }
            }
        }
        Some(recon)
    } else {
        None
    };

    // coarse scheme: e-basis start, `approx_iters` power steps, Ritz pairs
    let ar = approx_rank.min(g.n);
    let mut q = DMatrix::zeros(g.n, ar);
    for c in 0..ar {
        q[(c, c)] = 1.0;
    }
    mgs(&mut q);
    for _ in 0..approx_iters {
        q = &a * q;
        mgs(&mut q);
    }
    // reconstruction equals the projected operator Q (Q^T A Q) Q^T
    let b = q.transpose() * &a * &q;
    let approx = &q * b * q.transpose();

    LowRankOracle { exact, approx }
}

// ---- pair predictors ----

pub struct PairOracleContext {
    pub dist: Vec<Vec<usize>>,
    pub ppr: Vec<Vec<f64>>,
    pub lowrank: LowRankOracle,
}

impl PairOracleContext {
    pub fn new(g: &DenseGraph, rank: usize, approx_rank: usize, approx_iters: usize) -> Self {
        PairOracleContext {
            dist: distances(g),
            ppr: (0..g.n).map(|s| pagerank(g, Some(s))).collect(),
            lowrank: low_rank(g, rank, approx_rank, approx_iters),
        }
    }
}

fn lra_neighbor_mean(g: &DenseGraph, recon: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let ni = g.neighbors(i);
    let nj = g.neighbors(j);
    let total = ni.len() + nj.len();
    if total == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    for &u in &nj {
        s += recon[(i, u)];
    }
    for &v in &ni {
        s += recon[(v, j)];
    }
    s / total as f64
}

/// Pair row; LRA entries are None when the exact truncation is not unique.
pub fn pair_row(
    g: &DenseGraph,
    ctx: &PairOracleContext,
    i: usize,
    j: usize,
) -> [Option<f64>; 14] {
    let common: Vec<usize> = (0..g.n)
        .filter(|&z| z != i && z != j && g.a[i][z] > 0.0 && g.a[j][z] > 0.0)
        .collect();
    let cn = common.len() as f64;
    let ki = g.deg[i];
    let kj = g.deg[j];
    let sp = if ctx.dist[i][j] == usize::MAX {
        g.n as f64
    } else {
        ctx.dist[i][j] as f64
    };
    let union = ki + kj - common.len();
    let jc = if union == 0 { 0.0 } else { cn / union as f64 };
    let lhn = if ki == 0 || kj == 0 {
        0.0
    } else {
        cn / (ki * kj) as f64
    };
    let aa: f64 = common
        .iter()
        .filter(|&&z| g.deg[z] > 1)
        .map(|&z| 1.0 / (g.deg[z] as f64).ln())
        .sum();
    let ra: f64 = common
        .iter()
        .filter(|&&z| g.deg[z] > 0)
        .map(|&z| 1.0 / g.deg[z] as f64)
        .sum();
    let ppr = (ctx.ppr[i][j] + ctx.ppr[j][i]) / 2.0;

    let exact = ctx.lowrank.exact.as_ref();
    let lra = exact.map(|r| r[(i, j)]);
    let dlra = exact.map(|r| {
        (0..g.n).map(|t| r[(t, i)] * r[(t, j)]).sum::<f64>()
    });
    let mlra = exact.map(|r| lra_neighbor_mean(g, r, i, j));
    let ap = &ctx.lowrank.approx;
    let lra_a = ap[(i, j)];
    let dlra_a: f64 = (0..g.n).map(|t| ap[(t, i)] * ap[(t, j)]).sum();
    let mlra_a = lra_neighbor_mean(g, ap, i, j);

    [
        Some(cn),
        Some(sp),
        Some(lhn),
        Some(ppr),
        Some((ki * kj) as f64),
        Some(jc),
        Some(aa),
        Some(ra),
        lra,
        dlra,
        mlra,
        Some(lra_a),
        Some(dlra_a),
        Some(mlra_a),
    ]
}
