use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Partition, Side};
use crate::error::{Error, Result};
use crate::graph::SocialGraph;

fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "{what} must be a probability, got {p}"
        )));
    }
    Ok(())
}

fn two_block_partition(n_per_block: usize) -> Partition {
    Partition::new(
        (0..2 * n_per_block)
            .map(|i| if i < n_per_block { Side::L } else { Side::R })
            .collect(),
    )
    .expect("both blocks are non-empty")
}

/// Complete blocks `L = 0..N`, `R = N..2N` with within weight
/// `a_in / (N − 1)` and cross weight `a_out / N`, so every agent receives
/// exactly `a_in` from its block and `a_out` from the other.
pub fn symmetric_two_block(
    n_per_block: usize,
    a_in: f64,
    a_out: f64,
) -> Result<(SocialGraph, Partition)> {
    if n_per_block < 2 {
        return Err(Error::InvalidParams(format!(
            "blocks need at least 2 agents, got {n_per_block}"
        )));
    }
    if !(a_in > 0.0 && a_out > 0.0 && a_in.is_finite() && a_out.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "a_in and a_out must be positive, got {a_in} and {a_out}"
        )));
    }
    let n = n_per_block;
    let w_in = a_in / (n - 1) as f64;
    let w_out = a_out / n as f64;
    let mut edges = Vec::with_capacity(n * (n - 1) + n * n);
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            let same = (i < n) == (j < n);
            edges.push((i, j, if same { w_in } else { w_out }));
        }
    }
    Ok((
        SocialGraph::from_edges(2 * n, edges)?,
        two_block_partition(n),
    ))
}

/// Two blocks of `N` agents; each within pair is joined with probability
/// `p_in` and each cross pair with probability `p_out`, all with weight 1.
pub fn stochastic_two_block<R: Rng + ?Sized>(
    n_per_block: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Result<(SocialGraph, Partition)> {
    check_probability(p_in, "p_in")?;
    check_probability(p_out, "p_out")?;
    if n_per_block == 0 {
        return Err(Error::InvalidParams("blocks must be non-empty".into()));
    }
    let n = n_per_block;
    let mut edges = Vec::new();
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            let p = if (i < n) == (j < n) { p_in } else { p_out };
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    Ok((
        SocialGraph::from_edges(2 * n, edges)?,
        two_block_partition(n),
    ))
}

/// `G(n, p)` with unit weights.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<SocialGraph> {
    check_probability(p, "p")?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    SocialGraph::from_edges(n, edges)
}

/// Ring of `n` agents with strong ties between agents at ring distance at
/// most `r`, plus `k` weak ties per agent to uniformly chosen non-neighbours.
pub fn watts_strogatz_like<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    k: usize,
    rng: &mut R,
) -> Result<SocialGraph> {
    if r < 1 || 2 * r >= n {
        return Err(Error::InvalidParams(format!(
            "ring radius must satisfy 1 <= r < n/2, got r = {r}, n = {n}"
        )));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for d in 1..=r {
            let j = (i + d) % n;
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    for i in 0..n {
        let candidates: Vec<usize> = (0..n).filter(|&j| j != i && !adj[i].contains(&j)).collect();
        let picked: Vec<usize> = candidates.choose_multiple(rng, k).copied().collect();
        for j in picked {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.range(i + 1..).map(move |&j| (i, j, 1.0)));
    SocialGraph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graphgen::homophily;

    #[test]
    fn symmetric_two_block_sums() {
        let (g, p) = symmetric_two_block(2, 2.0, 1.0).unwrap();
        assert_eq!(g.weight(0, 1), Some(2.0));
        assert_eq!(g.weight(0, 2), Some(0.5));
        assert_eq!(homophily(&g, &p).unwrap().h, Some(2.0));

        let n = 7;
        let (g, p) = symmetric_two_block(n, 3.0, 1.5).unwrap();
        assert_eq!(g.edge_count(), n * (n - 1) + n * n);
        for (a_in, a_out) in homophily(&g, &p).unwrap().per_agent {
            assert!((a_in - 3.0).abs() < 1e-12 && (a_out - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn stochastic_two_block_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (g, _) = stochastic_two_block(4, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 0);
        let (g, _) = stochastic_two_block(4, 1.0, 1.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 28);
        assert!(stochastic_two_block(4, 1.5, 0.0, &mut rng).is_err());
    }

    #[test]
    fn erdos_renyi_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(erdos_renyi(10, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(10, 1.0, &mut rng).unwrap().edge_count(), 45);
        let mean = 4950.0 * 0.5;
        let sd = (4950.0f64 * 0.25).sqrt();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = erdos_renyi(100, 0.5, &mut rng).unwrap().edge_count() as f64;
            assert!((m - mean).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn ring_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = watts_strogatz_like(9, 1, 0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 9);
        let g = watts_strogatz_like(30, 3, 0, &mut rng).unwrap();
        assert!((0..30).all(|i| g.degree(i) == 6));
        let g = watts_strogatz_like(100, 5, 4, &mut rng).unwrap();
        assert!((0..100).all(|i| g.degree(i) >= 14));
        assert!(watts_strogatz_like(10, 5, 0, &mut rng).is_err());
        assert!(watts_strogatz_like(10, 0, 0, &mut rng).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = watts_strogatz_like(50, 3, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = watts_strogatz_like(50, 3, 5, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
