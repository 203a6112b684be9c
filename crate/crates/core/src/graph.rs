//! Honeycomb graphs: a one-dimensional chain of `m` cycles of `n_c` nodes,
//! consecutive cycles sharing a single node.
//!
//! Node indices are 0-based in memory. Cycle `p` (0-based) covers nodes
//! `p*(n_c-1) ..= (p+1)*(n_c-1)`, so the last node of a cycle is the first
//! node of the next one. Text interfaces use 1-based indices.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Smallest admissible cycle length.
pub const MIN_CYCLE_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HoneycombSpec {
    m: usize,
    n_c: usize,
}

impl HoneycombSpec {
    pub fn new(m: usize, n_c: usize) -> Result<Self> {
        if m < 1 || n_c < MIN_CYCLE_LEN {
            return Err(Error::InvalidSpec { m, n_c });
        }
        Ok(Self { m, n_c })
    }

    /// Number of cycles.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Nodes per cycle.
    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn node_count(&self) -> usize {
        self.m * (self.n_c - 1) + 1
    }

    pub fn edge_count(&self) -> usize {
        self.m * self.n_c
    }

    /// `ceil(n_c / 4) - 1`, the largest admissible |winding| per cycle.
    pub fn max_winding(&self) -> i64 {
        (self.n_c.div_ceil(4) - 1) as i64
    }

    /// Number of admissible winding values per cycle, `2*ceil(n_c/4) - 1`.
    pub fn base(&self) -> u32 {
        (2 * self.n_c.div_ceil(4) - 1) as u32
    }

    /// First node (0-based) of cycle `p` (0-based).
    pub fn cycle_start(&self, p: usize) -> usize {
        p * (self.n_c - 1)
    }
}

/// Undirected graph with unit edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from undirected pairs. Pairs are normalised to `i < j`;
    /// self-loops, duplicates and out-of-range nodes are rejected.
    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in pairs {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "bad edge ({a}, {b}) for n = {n}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if edges.contains(&e) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({a}, {b})"
                )));
            }
            edges.push(e);
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        Ok(Self {
            n,
            edges,
            neighbors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    pub fn adjacency_matrix(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
            l[(i, j)] -= 1.0;
            l[(j, i)] -= 1.0;
        }
        l
    }

    /// Oriented incidence matrix (`n x |E|`): column `e` holds `+1` at the
    /// lower endpoint and `-1` at the higher one.
    pub fn incidence_matrix(&self) -> Matrix {
        let mut b = Matrix::zeros(self.n, self.edges.len());
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            b[(i, e)] = 1.0;
            b[(j, e)] = -1.0;
        }
        b
    }
}

/// The `m` fundamental cycles of a honeycomb, each listed in increasing node
/// order. Traversal closes from the last node back to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    cycles: Vec<Vec<usize>>,
}

impl CycleBasis {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Directed edges of cycle `p` in traversal order, closing edge last.
    pub fn directed_edges(&self, p: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let c = &self.cycles[p];
        (0..c.len()).map(move |k| (c[k], c[(k + 1) % c.len()]))
    }

    /// Index of the cycle containing the undirected edge `(a, b)`, if any.
    pub fn cycle_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.cycles.len()).find(|&p| {
            self.directed_edges(p)
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
        })
    }
}

/// A honeycomb graph together with its spec and cycle basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Honeycomb {
    pub spec: HoneycombSpec,
    pub graph: Graph,
    pub cycles: CycleBasis,
}

impl Honeycomb {
    pub fn new(m: usize, n_c: usize) -> Result<Self> {
        Ok(build_honeycomb(HoneycombSpec::new(m, n_c)?))
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Edge list text: a header line then one 1-based `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# honeycomb m={} nc={}\n", self.spec.m(), self.spec.n_c());
        for &(i, j) in self.graph.edges() {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
        out
    }
}

pub fn build_honeycomb(spec: HoneycombSpec) -> Honeycomb {
    let n_c = spec.n_c();
    let mut pairs = Vec::with_capacity(spec.edge_count());
    let mut cycles = Vec::with_capacity(spec.m());
    for p in 0..spec.m() {
        let start = spec.cycle_start(p);
        let nodes: Vec<usize> = (start..start + n_c).collect();
        for k in 0..n_c - 1 {
            pairs.push((nodes[k], nodes[k + 1]));
        }
        pairs.push((nodes[0], nodes[n_c - 1]));
        cycles.push(nodes);
    }
    let graph = Graph::from_edges(spec.node_count(), &pairs)
        .expect("honeycomb construction yields a simple graph");
    Honeycomb {
        spec,
        graph,
        cycles: CycleBasis { cycles },
    }
}

/// Parse the edge-list text written by [`Honeycomb::to_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Honeycomb> {
    let mut spec = None;
    let mut pairs = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(header) = line.strip_prefix('#') {
            let mut m = None;
            let mut nc = None;
            for tok in header.split_whitespace() {
                if let Some(v) = tok.strip_prefix("m=") {
                    m = v.parse().ok();
                } else if let Some(v) = tok.strip_prefix("nc=") {
                    nc = v.parse().ok();
                }
            }
            if let (Some(m), Some(nc)) = (m, nc) {
                spec = Some(HoneycombSpec::new(m, nc)?);
            }
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) if a >= 1 && b >= 1 => pairs.push((a - 1, b - 1)),
            _ => return Err(Error::InvalidParameter(format!("bad edge line: {line:?}"))),
        }
    }
    let spec = spec.ok_or_else(|| Error::InvalidParameter("missing honeycomb header".into()))?;
    let hc = build_honeycomb(spec);
    let mut got: Vec<_> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut want = hc.graph.edges().to_vec();
    got.sort_unstable();
    want.sort_unstable();
    if got != want {
        return Err(Error::InvalidParameter(
            "edge list does not match the canonical honeycomb".into(),
        ));
    }
    Ok(hc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_specs() {
        assert!(matches!(
            HoneycombSpec::new(0, 5),
            Err(Error::InvalidSpec { .. })
        ));
        assert!(matches!(
            HoneycombSpec::new(2, 4),
            Err(Error::InvalidSpec { .. })
        ));
        assert!(HoneycombSpec::new(1, 5).is_ok());
    }

    #[test]
    fn three_pentagons_have_thirteen_nodes() {
        let hc = Honeycomb::new(3, 5).unwrap();
        assert_eq!(hc.node_count(), 13);
        assert_eq!(hc.graph.edges().len(), 15);
    }

    #[test]
    fn single_cycle() {
        let hc = Honeycomb::new(1, 5).unwrap();
        assert_eq!(hc.graph.edges().len(), 5);
        assert!(hc.graph.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn cycle_numbering_shares_endpoints() {
        let hc = Honeycomb::new(3, 6).unwrap();
        let c = hc.cycles.cycles();
        assert_eq!(c[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(c[1][0], 5);
        assert_eq!(c[2], vec![10, 11, 12, 13, 14, 15]);
    }

    #[test]
    fn structure_over_parameter_grid() {
        for m in 1..=6 {
            for n_c in 5..=9 {
                let hc = Honeycomb::new(m, n_c).unwrap();
                let g = &hc.graph;
                assert_eq!(g.node_count(), m * (n_c - 1) + 1);
                assert_eq!(g.edges().len(), m * n_c);
                let d = g.degrees();
                assert_eq!(d.iter().filter(|&&x| x == 4).count(), m - 1);
                assert_eq!(
                    d.iter().filter(|&&x| x == 2).count(),
                    g.node_count() - (m - 1)
                );
                assert!(g.is_connected());

                // Cycle edges cover the graph's edges exactly once.
                let mut covered = Vec::new();
                for p in 0..m {
                    let c = &hc.cycles.cycles()[p];
                    let distinct: std::collections::BTreeSet<_> = c.iter().collect();
                    assert_eq!(distinct.len(), n_c);
                    for (a, b) in hc.cycles.directed_edges(p) {
                        assert!(g.has_edge(a, b));
                        covered.push((a.min(b), a.max(b)));
                    }
                }
                covered.sort_unstable();
                let mut all = g.edges().to_vec();
                all.sort_unstable();
                assert_eq!(covered, all);

                for p in 1..m {
                    let prev: std::collections::BTreeSet<_> =
                        hc.cycles.cycles()[p - 1].iter().collect();
                    let shared = hc.cycles.cycles()[p]
                        .iter()
                        .filter(|x| prev.contains(x))
                        .count();
                    assert_eq!(shared, 1);
                }
            }
        }
    }

    #[test]
    fn incidence_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let b = g.incidence_matrix();
        assert_eq!(b.column(0), vec![1.0, -1.0]);
    }

    #[test]
    fn incidence_columns_are_signed_pairs() {
        let hc = Honeycomb::new(2, 5).unwrap();
        let b = hc.graph.incidence_matrix();
        assert_eq!((b.rows(), b.cols()), (9, 10));
        for e in 0..b.cols() {
            let col = b.column(e);
            assert_eq!(col.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&x| x == -1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&x| x == 0.0).count(), 7);
        }
        // B B^T is the Laplacian.
        let bt = b.transpose();
        let l = hc.graph.laplacian();
        for i in 0..9 {
            for j in 0..9 {
                let s: f64 = (0..10).map(|e| b[(i, e)] * bt[(e, j)]).sum();
                assert_eq!(s, l[(i, j)]);
            }
        }
    }

    #[test]
    fn graph_rejects_self_loops_and_duplicates() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let hc = Honeycomb::new(2, 5).unwrap();
        let text = hc.to_edge_list();
        assert!(text.starts_with("# honeycomb m=2 nc=5\n1 2\n"));
        assert_eq!(text.lines().count(), 11);
        assert_eq!(parse_edge_list(&text).unwrap(), hc);
        assert!(parse_edge_list("# honeycomb m=2 nc=5\n1 2\n").is_err());
    }
}
