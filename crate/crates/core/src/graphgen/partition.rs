use std::cmp::Ordering;

use rand::Rng;

use super::{Partition, Side};
use crate::graph::SocialGraph;

const GAIN_EPS: f64 = 1e-12;

/// Total weight of edges whose endpoints lie on different sides.
pub fn cut_weight(graph: &SocialGraph, partition: &Partition) -> f64 {
    graph
        .edges()
        .iter()
        .filter(|e| !partition.same_side(e.u, e.v))
        .map(|e| e.w)
        .sum()
}

/// Kernighan–Lin bipartition starting from `L = 0..⌊n/2⌋`, `R` = the rest.
pub fn kernighan_lin(graph: &SocialGraph) -> Partition {
    let n = graph.node_count();
    let start = Partition::split_at(n, n / 2).expect("n/2 split is balanced");
    kernighan_lin_from(graph, start)
}

/// Classic pass-based Kernighan–Lin refinement of `start`, minimising cut
/// weight while keeping side sizes fixed. Equal gains are broken by the
/// smallest agent ids, so the result is deterministic.
pub fn kernighan_lin_from(graph: &SocialGraph, start: Partition) -> Partition {
    let n = graph.node_count();
    let mut sides = start.sides().to_vec();
    if n < 2 {
        return start;
    }
    loop {
        // D(v) = external − internal weight.
        let mut d: Vec<f64> = (0..n)
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .map(|&(u, w)| if sides[u] == sides[v] { -w } else { w })
                    .sum()
            })
            .collect();
        let mut locked = vec![false; n];
        let pairs_possible = sides
            .iter()
            .filter(|&&s| s == Side::L)
            .count()
            .min(sides.iter().filter(|&&s| s == Side::R).count());
        let mut swaps = Vec::with_capacity(pairs_possible);
        let mut gains = Vec::with_capacity(pairs_possible);
        for _ in 0..pairs_possible {
            let order = |side: Side, locked: &[bool], d: &[f64]| {
                let mut v: Vec<usize> =
                    (0..n).filter(|&i| sides[i] == side && !locked[i]).collect();
                v.sort_by(|&a, &b| {
                    d[b].partial_cmp(&d[a])
                        .unwrap_or(Ordering::Equal)
                        .then(a.cmp(&b))
                });
                v
            };
            let left = order(Side::L, &locked, &d);
            let right = order(Side::R, &locked, &d);
            let mut best: Option<(f64, usize, usize)> = None;
            for &a in &left {
                if let Some((g, _, _)) = best {
                    if d[a] + d[right[0]] < g - GAIN_EPS {
                        break;
                    }
                }
                for &b in &right {
                    let bound = d[a] + d[b];
                    if let Some((g, _, _)) = best {
                        if bound < g - GAIN_EPS {
                            break;
                        }
                    }
                    let g = bound - 2.0 * graph.weight(a, b).unwrap_or(0.0);
                    let better = match best {
                        None => true,
                        Some((bg, ba, bb)) => {
                            g > bg + GAIN_EPS || ((g - bg).abs() <= GAIN_EPS && (a, b) < (ba, bb))
                        }
                    };
                    if better {
                        best = Some((g, a, b));
                    }
                }
            }
            let (g, a, b) = best.expect("both sides have unlocked agents");
            locked[a] = true;
            locked[b] = true;
            for &(x, w) in graph.neighbors(a) {
                if !locked[x] {
                    d[x] += if sides[x] == Side::L {
                        2.0 * w
                    } else {
                        -2.0 * w
                    };
                }
            }
            for &(x, w) in graph.neighbors(b) {
                if !locked[x] {
                    d[x] += if sides[x] == Side::R {
                        2.0 * w
                    } else {
                        -2.0 * w
                    };
                }
            }
            swaps.push((a, b));
            gains.push(g);
        }
        let mut best_k = 0;
        let mut best_total = 0.0;
        let mut total = 0.0;
        for (k, g) in gains.iter().enumerate() {
            total += g;
            if total > best_total + GAIN_EPS {
                best_total = total;
                best_k = k + 1;
            }
        }
        if best_k == 0 {
            break;
        }
        for &(a, b) in &swaps[..best_k] {
            sides[a] = Side::R;
            sides[b] = Side::L;
        }
    }
    Partition::new(sides).expect("swaps preserve side sizes")
}

/// Draws `p_L ~ U[0.4, 0.6]` and puts each agent on `L` with probability
/// `p_L`, redrawing until both sides are non-empty.
pub fn random_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    loop {
        let p_left = rng.gen_range(0.4..=0.6);
        let sides: Vec<Side> = (0..n)
            .map(|_| {
                if rng.gen_bool(p_left) {
                    Side::L
                } else {
                    Side::R
                }
            })
            .collect();
        if let Ok(p) = Partition::new(sides) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn bridged_triangles() -> SocialGraph {
        // Triangles {0, 2, 4} and {1, 3, 5}, bridged by 4-5, so the
        // initial split {0, 1, 2} | {3, 4, 5} is far from optimal.
        SocialGraph::from_edges(
            6,
            [
                (0, 2, 1.0),
                (2, 4, 1.0),
                (0, 4, 1.0),
                (1, 3, 1.0),
                (3, 5, 1.0),
                (1, 5, 1.0),
                (4, 5, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn finds_the_two_triangles() {
        let g = bridged_triangles();
        let p = kernighan_lin(&g);
        assert_eq!(cut_weight(&g, &p), 1.0);
        assert!(p.same_side(0, 2) && p.same_side(2, 4) && !p.same_side(0, 1));
    }

    #[test]
    fn never_worse_than_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = crate::graphgen::erdos_renyi(20, 0.3, &mut rng).unwrap();
            let start = Partition::split_at(20, 10).unwrap();
            let before = cut_weight(&g, &start);
            let p = kernighan_lin(&g);
            assert!(cut_weight(&g, &p) <= before + 1e-12);
            assert_eq!(p.count(Side::L), 10);
        }
    }

    #[test]
    fn separates_disconnected_cliques() {
        let mut edges = Vec::new();
        for c in [[0, 3, 4], [1, 2, 5]] {
            for i in 0..3 {
                for j in i + 1..3 {
                    edges.push((c[i], c[j], 1.0));
                }
            }
        }
        let g = SocialGraph::from_edges(6, edges).unwrap();
        assert_eq!(cut_weight(&g, &kernighan_lin(&g)), 0.0);
    }

    #[test]
    fn random_partition_properties() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..50 {
            let p = random_partition(2, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(p.count(Side::L), 1);
            seen.insert(p.side(0));
        }
        assert_eq!(seen.len(), 2);
        let a = random_partition(30, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_partition(30, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }
}
