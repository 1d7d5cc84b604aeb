//! Standard graph families used by tests, benchmarks and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::{Edge, UnionFind, WeightedMultiGraph};
use crate::rng::Rng;

fn unit(n: usize, pairs: Vec<(usize, usize)>) -> WeightedMultiGraph {
    WeightedMultiGraph::from_valid_edges(
        n,
        pairs
            .into_iter()
            .map(|(u, v)| Edge { u, v, w: 1.0 })
            .collect(),
    )
}

pub fn path(n: usize) -> WeightedMultiGraph {
    unit(n, (1..n).map(|i| (i - 1, i)).collect())
}

pub fn cycle(n: usize) -> WeightedMultiGraph {
    let mut p: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        p.push((n - 1, 0));
    }
    unit(n, p)
}

pub fn complete(n: usize) -> WeightedMultiGraph {
    let mut p = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            p.push((u, v));
        }
    }
    unit(n, p)
}

/// Center 0 joined to `leaves` leaves.
pub fn star(leaves: usize) -> WeightedMultiGraph {
    unit(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
}

/// `K_{a,b}` with left side `0..a` and right side `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> WeightedMultiGraph {
    let mut p = Vec::new();
    for u in 0..a {
        for v in 0..b {
            p.push((u, a + v));
        }
    }
    unit(a + b, p)
}

/// `rows × cols` grid, vertex `r*cols + c`.
pub fn grid(rows: usize, cols: usize) -> WeightedMultiGraph {
    let mut p = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                p.push((v, v + 1));
            }
            if r + 1 < rows {
                p.push((v, v + cols));
            }
        }
    }
    unit(rows * cols, p)
}

pub fn hypercube(dim: usize) -> WeightedMultiGraph {
    let n = 1usize << dim;
    let mut p = Vec::new();
    for v in 0..n {
        for b in 0..dim {
            let u = v ^ (1 << b);
            if v < u {
                p.push((v, u));
            }
        }
    }
    unit(n, p)
}

/// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes from `i` to `i+5`.
pub fn petersen() -> WeightedMultiGraph {
    let mut p = Vec::new();
    for i in 0..5 {
        p.push((i, (i + 1) % 5));
        p.push((5 + i, 5 + (i + 2) % 5));
        p.push((i, i + 5));
    }
    unit(10, p)
}

/// Two disjoint `K_a` joined by a single edge from `0` to `a`.
pub fn two_cliques_bridge(a: usize) -> WeightedMultiGraph {
    let mut p = Vec::new();
    for off in [0, a] {
        for u in 0..a {
            for v in u + 1..a {
                p.push((off + u, off + v));
            }
        }
    }
    p.push((0, a));
    unit(2 * a, p)
}

/// Uniform random labelled tree (random attachment over a shuffled order)
/// plus `m - (n-1)` extra distinct non-loop edges, unit weights.
pub fn random_connected(n: usize, m: usize, rng: &mut Rng) -> WeightedMultiGraph {
    unit(n, random_connected_pairs(n, m, rng))
}

fn random_connected_pairs(n: usize, m: usize, rng: &mut Rng) -> Vec<(usize, usize)> {
    let max_m = n * (n - 1) / 2;
    let m = m.clamp(n.saturating_sub(1), max_m);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = alloc::collections::BTreeSet::new();
    let mut pairs = Vec::with_capacity(m);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        present.insert((a.min(b), a.max(b)));
        pairs.push((a, b));
    }
    while pairs.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && present.insert((a.min(b), a.max(b))) {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Connected random graph with weights log-uniform in `[lo, hi]`.
pub fn random_weighted(n: usize, m: usize, lo: f64, hi: f64, rng: &mut Rng) -> WeightedMultiGraph {
    let pairs = random_connected_pairs(n, m, rng);
    let (a, b) = (libm::log(lo), libm::log(hi));
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            w: libm::exp(a + (b - a) * rng.gen::<f64>()),
        })
        .collect();
    WeightedMultiGraph::from_valid_edges(n, edges)
}

/// Erdős–Rényi `G(n, p)`, unit weights.
pub fn gnp(n: usize, p: f64, rng: &mut Rng) -> WeightedMultiGraph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    unit(n, pairs)
}

/// Simple random `d`-regular graph. Stubs are paired one at a time, rejecting
/// loops and repeated pairs; a run that paints itself into a corner restarts.
/// `n·d` must be even and `d < n`.
pub fn random_regular(n: usize, d: usize, rng: &mut Rng) -> WeightedMultiGraph {
    assert!(
        d < n && (n * d).is_multiple_of(2),
        "random_regular needs d < n and n·d even"
    );
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, d)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        let mut pairs = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut tries = 0;
            loop {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                let (a, b) = (stubs[i], stubs[j]);
                if i != j && a != b && !adj[a].contains(&b) {
                    adj[a].push(b);
                    adj[b].push(a);
                    pairs.push((a, b));
                    let (hi, lo) = (i.max(j), i.min(j));
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                    break;
                }
                tries += 1;
                if tries > 50 * (stubs.len() + 10) {
                    continue 'restart;
                }
            }
        }
        let g = unit(n, pairs);
        if g.is_connected() {
            return g;
        }
    }
}

/// Grid whose weights are log-uniform over `[1, ratio]`.
pub fn heavy_weight_grid(
    rows: usize,
    cols: usize,
    ratio: f64,
    rng: &mut Rng,
) -> WeightedMultiGraph {
    let g = grid(rows, cols);
    let lr = libm::log(ratio);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge {
            w: libm::exp(lr * rng.gen::<f64>()),
            ..*e
        })
        .collect();
    WeightedMultiGraph::from_valid_edges(g.n(), edges)
}

/// Random spanning tree of `g` (Kruskal over a shuffled edge order).
pub fn random_spanning_tree(g: &WeightedMultiGraph, rng: &mut Rng) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..g.m()).collect();
    ids.shuffle(rng);
    let mut uf = UnionFind::new(g.n());
    ids.into_iter()
        .filter(|&id| uf.union(g.edge(id).u, g.edge(id).v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(grid(4, 4).m(), 24);
        assert_eq!(hypercube(4).m(), 32);
        assert_eq!(petersen().m(), 15);
        assert!((0..10).all(|v| petersen().edge_degree(v) == 3));
        assert_eq!(complete_bipartite(4, 16).m(), 64);
        assert_eq!(two_cliques_bridge(20).m(), 2 * 190 + 1);
        assert_eq!(cycle(8).m(), 8);
    }

    #[test]
    fn random_regular_is_simple_and_regular() {
        let mut rng = crate::rng::seeded(3);
        let g = random_regular(200, 8, &mut rng);
        assert!((0..200).all(|v| g.edge_degree(v) == 8));
        let (s, _) = g.collapse_to_simple();
        assert_eq!(s.m(), g.m());
    }

    #[test]
    fn random_connected_is_connected() {
        let mut rng = crate::rng::seeded(4);
        for n in [2, 5, 50] {
            let g = random_connected(n, 2 * n, &mut rng);
            assert!(g.is_connected());
        }
    }
}
