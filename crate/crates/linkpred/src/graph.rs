//! Simple undirected graph and edge-list ingestion.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable simple undirected graph over dense node ids `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`; the adjacency index keeps
/// sorted neighbor lists so membership queries agree with the edge set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

/// Ingestion bookkeeping: lines dropped while parsing an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl Graph {
    /// Build a graph from an edge list over `0..n`. Self-loops and duplicate
    /// edges are rejected here; use [`Graph::parse_edge_list`] for lenient
    /// text ingestion.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a},{b}) out of range for n={n}"
                )));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(Error::InvalidArgument("duplicate edge".into()));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must already be deduplicated pairs with `i < j`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    /// Parse a whitespace-separated edge list.
    ///
    /// Node tokens are mapped to dense ids in first-appearance order. Lines
    /// starting with `#` and blank lines are skipped; duplicate edges and
    /// self-loops are dropped and counted in the returned stats.
    pub fn parse_edge_list(text: &str) -> Result<(Self, IngestStats)> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut raw: Vec<(usize, usize)> = Vec::new();
        let mut stats = IngestStats::default();

        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("expected two node tokens, got {line:?}"),
                    })
                }
            };
            let next_id = ids.len();
            let ia = *ids.entry(a).or_insert(next_id);
            let next_id = ids.len();
            let ib = *ids.entry(b).or_insert(next_id);
            if ia == ib {
                stats.self_loops += 1;
                continue;
            }
            raw.push((ia.min(ib), ia.max(ib)));
        }

        if ids.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "empty edge list".into(),
            });
        }

        let n = ids.len();
        let mut canon = raw;
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        stats.duplicate_edges = before - canon.len();
        Ok((Self::from_canonical(n, canon), stats))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(i, j)` edges with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a == b || a >= self.n || b >= self.n {
            return false;
        }
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Number of unordered node pairs that are not edges.
    pub fn non_edge_count(&self) -> usize {
        self.n * (self.n - 1) / 2 - self.edges.len()
    }

    /// All non-edges in lexicographic order. Quadratic; intended for small
    /// graphs or capped sampling fallbacks.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.non_edge_count());
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// BFS hop distances from `source`; `usize::MAX` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Count of triangles incident to each node.
    pub fn triangles_per_node(&self) -> Vec<usize> {
        let mut tri = vec![0usize; self.n];
        for &(i, j) in &self.edges {
            // intersect sorted neighbor lists, counting common neighbors k
            let (mut a, mut b) = (self.adj[i].iter(), self.adj[j].iter());
            let (mut x, mut y) = (a.next(), b.next());
            while let (Some(&u), Some(&v)) = (x, y) {
                match u.cmp(&v) {
                    std::cmp::Ordering::Less => x = a.next(),
                    std::cmp::Ordering::Greater => y = b.next(),
                    std::cmp::Ordering::Equal => {
                        tri[u] += 1;
                        // each triangle {i,j,u} is found once per edge, so
                        // endpoints are credited via the other two edges
                        x = a.next();
                        y = b.next();
                    }
                }
            }
        }
        tri
    }

    /// Sorted common neighbors of `a` and `b`.
    pub fn common_neighbors(&self, a: usize, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut ia, mut ib) = (self.adj[a].iter(), self.adj[b].iter());
        let (mut x, mut y) = (ia.next(), ib.next());
        while let (Some(&u), Some(&v)) = (x, y) {
            match u.cmp(&v) {
                std::cmp::Ordering::Less => x = ia.next(),
                std::cmp::Ordering::Greater => y = ib.next(),
                std::cmp::Ordering::Equal => {
                    out.push(u);
                    x = ia.next();
                    y = ib.next();
                }
            }
        }
        out
    }

    /// Serialize back to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edges.len())
    }
}
