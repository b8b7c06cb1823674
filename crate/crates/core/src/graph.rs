//! Undirected weighted social graphs.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// One undirected edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A simple undirected graph on agents `0..n` with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl SocialGraph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and weights that are not strictly positive and finite.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has an endpoint outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at agent {a}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has non-positive or non-finite weight {w}"
                )));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        for e in &list {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for row in &mut adj {
            row.sort_by_key(|&(j, _)| j);
        }
        Ok(SocialGraph {
            n,
            edges: list,
            adj,
        })
    }

    /// A graph with no edges.
    pub fn empty(n: usize) -> Self {
        SocialGraph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `i` with the connecting weight, sorted by neighbour id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// Sum of the weights incident to `i`.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.adj[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|p| self.adj[i][p].1)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    /// The same topology with every weight replaced by `f(edge)`.
    pub fn reweighted(&self, mut f: impl FnMut(&Edge) -> f64) -> Result<Self> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, f(e))).collect();
        SocialGraph::from_edges(self.n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_adjacency_both_ways() {
        let g = SocialGraph::from_edges(3, [(0, 1, 2.0), (2, 1, 0.5)]).unwrap();
        assert_eq!(g.neighbors(1), &[(0, 2.0), (2, 0.5)]);
        assert_eq!(g.weight(2, 1), Some(0.5));
        assert_eq!(g.weight(0, 2), None);
        assert_eq!(g.weighted_degree(1), 2.5);
        assert_eq!(g.edges()[1], Edge { u: 1, v: 2, w: 0.5 });
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(SocialGraph::from_edges(2, [(0, 0, 1.0)]).is_err());
        assert!(SocialGraph::from_edges(2, [(0, 2, 1.0)]).is_err());
        assert!(SocialGraph::from_edges(2, [(0, 1, 0.0)]).is_err());
        assert!(SocialGraph::from_edges(2, [(0, 1, f64::NAN)]).is_err());
        assert!(SocialGraph::from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    }
}
