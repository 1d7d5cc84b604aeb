use alloc::vec::Vec;

use rand::Rng as _;

use crate::graph::{Edge, WeightedMultiGraph};
use crate::rng::Rng;

/// Result of independent uniform edge sampling.
#[derive(Clone, Debug)]
pub struct UniformSample {
    /// Sampled graph on the same vertex set, all weights 1.
    pub graph: WeightedMultiGraph,
    /// Host edge id of each sampled edge.
    pub kept: Vec<usize>,
    pub p: f64,
}

/// Sampling probability `min(1, c_unif · ln n / d)`.
pub fn sampling_probability(n: usize, d: f64, c_unif: f64) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    (c_unif * libm::log(n.max(1) as f64) / d).min(1.0)
}

/// Keeps each edge of `g` independently with probability
/// `p = min(1, c_unif · ln n / d)`. Loops are never sampled. When `p = 1`
/// the output is `g` itself with unit weights and no randomness is consumed.
pub fn uniform_sample_graph(
    g: &WeightedMultiGraph,
    d: f64,
    c_unif: f64,
    rng: &mut Rng,
) -> UniformSample {
    let p = sampling_probability(g.n(), d, c_unif);
    let kept: Vec<usize> = if p >= 1.0 {
        (0..g.m()).filter(|&id| !g.edge(id).is_loop()).collect()
    } else {
        (0..g.m())
            .filter(|&id| rng.gen::<f64>() < p && !g.edge(id).is_loop())
            .collect()
    };
    let edges = kept
        .iter()
        .map(|&id| Edge {
            w: 1.0,
            ..g.edge(id)
        })
        .collect();
    UniformSample {
        graph: WeightedMultiGraph::from_valid_edges(g.n(), edges),
        kept,
        p,
    }
}

/// Whether every vertex degree of `h` lies in `[p/2 · deg_G, 2p · deg_G]`.
pub fn degree_bound_holds(g: &WeightedMultiGraph, h: &WeightedMultiGraph, p: f64) -> bool {
    (0..g.n()).all(|a| {
        let dg = g.edge_degree(a) as f64;
        let dh = h.edge_degree(a) as f64;
        dh >= p / 2.0 * dg && dh <= 2.0 * p * dg
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::build_graph;
    use crate::oracle::{laplacian_dense, psd_le};

    #[test]
    fn p_one_returns_the_graph() {
        let g = generators::petersen();
        let s = uniform_sample_graph(&g, 1.0, 1.0, &mut crate::rng::seeded(0));
        assert_eq!(s.p, 1.0);
        assert_eq!(s.graph.edges(), g.edges());
    }

    #[test]
    fn k200_degree_window() {
        let g = generators::complete(200);
        let mut violations = 0;
        for seed in 0..100 {
            let s = uniform_sample_graph(&g, 20.0, 32.0, &mut crate::rng::seeded(seed));
            if s.p < 1.0 && !degree_bound_holds(&g, &s.graph, s.p) {
                violations += 1;
            }
        }
        assert!(violations <= 1);
    }

    #[test]
    fn k60_sandwich() {
        let n = 60;
        let g = generators::complete(n);
        let d = 59.0;
        let c_unif = 4.0;
        let mut kn = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                kn.push((u, v, 1.0));
            }
        }
        let lk = laplacian_dense(&build_graph(n, kn).unwrap());
        let lg = laplacian_dense(&g);
        let mut ok = 0;
        for seed in 0..20 {
            let s = uniform_sample_graph(&g, d, c_unif, &mut crate::rng::seeded(seed));
            let lh = laplacian_dense(&s.graph);
            let slack = &lk * (s.p * d / n as f64);
            let plg = &lg * s.p;
            let lo = &lh * 0.5 - &slack;
            let hi = &lh * 1.5 + &slack;
            if psd_le(&lo, &plg) && psd_le(&plg, &hi) {
                ok += 1;
            }
        }
        assert!(ok >= 19);
    }
}
