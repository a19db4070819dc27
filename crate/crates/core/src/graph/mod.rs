//! Weighted undirected simple graphs.
//!
//! Vertices are dense ids `0..n`. Every edge is stored once in the edge list
//! (with `u < v`) and twice in the adjacency index, carrying the same `f64`
//! in both directions.

mod generators;
mod io;
mod traversal;

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use generators::{
    gen_complete, gen_cycle, gen_hypercube, gen_path, gen_petersen, gen_random_regular, gen_star,
    RANDOM_REGULAR_MAX_ATTEMPTS,
};
pub use io::{load_graph, parse_edge_list, save_graph, write_edge_list};
pub use traversal::{ball_size_check, bfs_tree, girth, BallReport, BfsTree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Shortest cycle length, or `Infinite` for forests. Serialized as a number
/// or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn is_infinite(self) -> bool {
        matches!(self, Girth::Infinite)
    }

    /// True when every cycle is strictly longer than `len`.
    pub fn exceeds(self, len: usize) -> bool {
        match self {
            Girth::Finite(g) => g > len,
            Girth::Infinite => true,
        }
    }

    pub fn at_least(self, len: usize) -> bool {
        match self {
            Girth::Finite(g) => g >= len,
            Girth::Infinite => true,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u64(*g as u64),
            Girth::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeSummary {
    pub combinatorial: Vec<usize>,
    pub weighted: Vec<f64>,
    pub max_combinatorial: usize,
    pub min_combinatorial: usize,
    pub max_weighted: f64,
    pub min_weighted: f64,
    /// `2m/n`.
    pub average_combinatorial: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
    girth: OnceLock<Girth>,
}

impl WeightedGraph {
    /// Builds a graph, rejecting self-loops, repeated pairs, out-of-range ids
    /// and weights that are not strictly positive and finite.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::Precondition("graph needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for (a, b, w) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::BadWeight { u: a, v: b, w });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge(u, v));
            }
            list.push(Edge { u, v, w });
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_by_key(|&(x, _)| x);
        }
        Ok(Self {
            n,
            edges: list,
            adj,
            girth: OnceLock::new(),
        })
    }

    /// Unit-weight graph from vertex pairs.
    pub fn unweighted<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let nbrs = self.adj.get(u)?;
        nbrs.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| nbrs[i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|&(_, w)| w).sum()
    }

    pub fn combinatorial_degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Average combinatorial degree `2m/n`.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.m() as f64 / self.n as f64
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.n)
            .map(|u| self.weighted_degree(u))
            .fold(0.0, f64::max)
    }

    pub fn degrees(&self) -> DegreeSummary {
        let combinatorial: Vec<usize> = (0..self.n).map(|u| self.combinatorial_degree(u)).collect();
        let weighted: Vec<f64> = (0..self.n).map(|u| self.weighted_degree(u)).collect();
        DegreeSummary {
            max_combinatorial: combinatorial.iter().copied().max().unwrap_or(0),
            min_combinatorial: combinatorial.iter().copied().min().unwrap_or(0),
            max_weighted: weighted.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_weighted: weighted.iter().copied().fold(f64::INFINITY, f64::min),
            average_combinatorial: self.average_degree(),
            combinatorial,
            weighted,
        }
    }

    /// Girth, computed once and cached.
    pub fn girth(&self) -> Girth {
        *self.girth.get_or_init(|| traversal::girth(self))
    }

    /// Same graph with every weight replaced by `f(edge)`.
    pub fn map_weights<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Edge) -> f64,
    {
        let g = Self::new(self.n, self.edges.iter().map(|e| (e.u, e.v, f(e))))?;
        if let Some(&girth) = self.girth.get() {
            let _ = g.girth.set(girth);
        }
        Ok(g)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map_weights(|e| e.w * c)
    }

    /// Rescales all weights by `1 / max_u w(u)`, so the maximum weighted
    /// degree becomes 1. `λ_n/λ_2` is unchanged.
    pub fn normalize_max_weighted_degree(&self) -> Result<Self> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        let c = 1.0 / self.max_weighted_degree();
        self.scaled(c)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }
}

/// Convenience for callers that already validated their input.
pub fn normalize_max_weighted_degree(g: &WeightedGraph) -> Result<WeightedGraph> {
    g.normalize_max_weighted_degree()
}

pub fn degrees(g: &WeightedGraph) -> DegreeSummary {
    g.degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(w: f64) -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, w), (1, 2, w), (0, 2, w)]).unwrap()
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            WeightedGraph::new(2, [(0, 0, 1.0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, 0.0)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, f64::NAN)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 2, 1.0)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn neighbor_symmetry_is_bitwise() {
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (2, 1, 1.0 / 3.0), (3, 0, 0.7)]).unwrap();
        for e in g.edges() {
            assert_eq!(g.weight(e.u, e.v).unwrap().to_bits(), e.w.to_bits());
            assert_eq!(g.weight(e.v, e.u).unwrap().to_bits(), e.w.to_bits());
        }
    }

    #[test]
    fn degree_examples() {
        let star = gen_star(5).unwrap();
        let d = star.degrees();
        assert_eq!((d.combinatorial[0], d.weighted[0]), (4, 4.0));
        for leaf in 1..5 {
            assert_eq!((d.combinatorial[leaf], d.weighted[leaf]), (1, 1.0));
        }

        let single = WeightedGraph::new(2, [(0, 1, 0.3)]).unwrap();
        assert_eq!(single.degrees().weighted, vec![0.3, 0.3]);

        let reg = gen_hypercube(3).unwrap();
        let d = reg.degrees();
        assert!(d.combinatorial.iter().all(|&c| c == 3));
        assert!(d.weighted.iter().all(|&w| w == 3.0));
        assert_eq!(d.average_combinatorial, 3.0);
    }

    #[test]
    fn normalize_examples() {
        let g = triangle(2.0).normalize_max_weighted_degree().unwrap();
        for e in g.edges() {
            assert_eq!(e.w, 0.5);
        }
        assert!(g.degrees().weighted.iter().all(|&w| (w - 1.0).abs() < 1e-12));

        let path = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let p = path.normalize_max_weighted_degree().unwrap();
        assert_eq!(p.edges()[0].w, 0.25);
        assert_eq!(p.edges()[1].w, 0.75);
        assert_eq!(p.weighted_degree(1), 1.0);

        let unit = triangle(0.5);
        let same = unit.normalize_max_weighted_degree().unwrap();
        assert_eq!(unit.edges(), same.edges());

        let empty = WeightedGraph::new(3, []).unwrap();
        assert!(matches!(
            empty.normalize_max_weighted_degree(),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn girth_display_and_json() {
        assert_eq!(Girth::Infinite.to_string(), "inf");
        assert_eq!(serde_json::to_string(&Girth::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Girth::Finite(5)).unwrap(), "5");
        assert!(Girth::Finite(6).exceeds(5));
        assert!(!Girth::Finite(5).exceeds(5));
    }

    #[test]
    fn connectivity() {
        assert!(triangle(1.0).is_connected());
        let two = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!two.is_connected());
    }
}
