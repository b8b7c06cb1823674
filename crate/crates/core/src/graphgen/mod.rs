//! Network families, bipartitions, weight assignment, the homophily ratio
//! and edge-list input/output.

mod generators;
mod hyperbolic;
mod io;
mod partition;

pub use generators::{erdos_renyi, stochastic_two_block, symmetric_two_block, watts_strogatz_like};
pub use hyperbolic::{hyperbolic_rgg, HyperbolicParams};
pub use io::{load_edge_list, read_edge_list, write_edge_list, LoadedGraph};
pub use partition::{cut_weight, kernighan_lin, kernighan_lin_from, random_partition};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

/// Assignment of every agent to side `L` or `R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    sides: Vec<Side>,
}

impl Partition {
    /// Fails when `n ≥ 2` and one side is empty.
    pub fn new(sides: Vec<Side>) -> Result<Self> {
        let p = Partition { sides };
        if p.len() >= 2 && (p.count(Side::L) == 0 || p.count(Side::R) == 0) {
            return Err(Error::InvalidGraph("partition has an empty side".into()));
        }
        Ok(p)
    }

    /// First `n_left` agents on `L`, the rest on `R`.
    pub fn split_at(n: usize, n_left: usize) -> Result<Self> {
        Partition::new(
            (0..n)
                .map(|i| if i < n_left { Side::L } else { Side::R })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, i: usize) -> Side {
        self.sides[i]
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn count(&self, side: Side) -> usize {
        self.sides.iter().filter(|&&s| s == side).count()
    }

    pub fn members(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        self.sides
            .iter()
            .enumerate()
            .filter(move |&(_, &s)| s == side)
            .map(|(i, _)| i)
    }

    pub fn same_side(&self, i: usize, j: usize) -> bool {
        self.sides[i] == self.sides[j]
    }
}

/// Per-agent and mean within/cross influence.
#[derive(Debug, Clone, PartialEq)]
pub struct HomophilyReport {
    pub a_in_star: f64,
    pub a_out_star: f64,
    /// `a_in* / a_out*`, or `None` when there is no cross-side weight.
    pub h: Option<f64>,
    /// `(a_in(i), a_out(i))` for each agent.
    pub per_agent: Vec<(f64, f64)>,
}

pub fn homophily(graph: &SocialGraph, partition: &Partition) -> Result<HomophilyReport> {
    check_sizes(graph, partition)?;
    let n = graph.node_count();
    let mut per_agent = vec![(0.0, 0.0); n];
    for e in graph.edges() {
        if partition.same_side(e.u, e.v) {
            per_agent[e.u].0 += e.w;
            per_agent[e.v].0 += e.w;
        } else {
            per_agent[e.u].1 += e.w;
            per_agent[e.v].1 += e.w;
        }
    }
    let nf = n.max(1) as f64;
    let a_in_star = per_agent.iter().map(|p| p.0).sum::<f64>() / nf;
    let a_out_star = per_agent.iter().map(|p| p.1).sum::<f64>() / nf;
    let h = (a_out_star > 0.0).then(|| a_in_star / a_out_star);
    Ok(HomophilyReport {
        a_in_star,
        a_out_star,
        h,
        per_agent,
    })
}

/// Same topology with within-side edges weighted `w_in` and cross edges `w_out`.
pub fn assign_weights(
    graph: &SocialGraph,
    partition: &Partition,
    w_in: f64,
    w_out: f64,
) -> Result<SocialGraph> {
    check_sizes(graph, partition)?;
    if !(w_in > 0.0 && w_out > 0.0) {
        return Err(Error::InvalidParams(format!(
            "weights must be positive, got w_in = {w_in}, w_out = {w_out}"
        )));
    }
    graph.reweighted(|e| {
        if partition.same_side(e.u, e.v) {
            w_in
        } else {
            w_out
        }
    })
}

fn check_sizes(graph: &SocialGraph, partition: &Partition) -> Result<()> {
    if graph.node_count() != partition.len() {
        return Err(Error::InvalidGraph(format!(
            "partition covers {} agents but the graph has {}",
            partition.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_rejects_empty_side() {
        assert!(Partition::new(vec![Side::L, Side::L]).is_err());
        assert!(Partition::new(vec![Side::L]).is_ok());
        assert_eq!(Partition::split_at(5, 2).unwrap().count(Side::R), 3);
    }

    #[test]
    fn complete_graph_homophily() {
        // Unit complete graph on 2N nodes with a balanced split: h = (N-1)/N.
        let n = 5;
        let edges: Vec<_> = (0..2 * n)
            .flat_map(|i| (i + 1..2 * n).map(move |j| (i, j, 1.0)))
            .collect();
        let g = SocialGraph::from_edges(2 * n, edges).unwrap();
        let p = Partition::split_at(2 * n, n).unwrap();
        let r = homophily(&g, &p).unwrap();
        assert!((r.h.unwrap() - 4.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn no_cross_edges_means_undefined_h() {
        let g = SocialGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let p = Partition::split_at(4, 2).unwrap();
        assert_eq!(homophily(&g, &p).unwrap().h, None);
    }

    #[test]
    fn weights_follow_sides() {
        let g = SocialGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let p = Partition::split_at(4, 2).unwrap();
        let w = assign_weights(&g, &p, 4.0, 0.5).unwrap();
        assert_eq!(w.weight(0, 1), Some(4.0));
        assert_eq!(w.weight(1, 2), Some(0.5));
        assert_eq!(cut_weight(&w, &p), 0.5);
        let w2 = assign_weights(&g, &p, 2.0, 0.5).unwrap();
        let (r4, r2) = (homophily(&w, &p).unwrap(), homophily(&w2, &p).unwrap());
        for (a, b) in r4.per_agent.iter().zip(&r2.per_agent) {
            assert_eq!(a.0, 2.0 * b.0);
        }
    }
}
