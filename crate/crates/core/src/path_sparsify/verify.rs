//! Checking path-sparsifier claims on concrete edges.
//!
//! Counting vertex-disjoint paths under a length bound is hard in general, so
//! the check is a greedy lower bound: repeatedly take a shortest path in
//! `G[F]` that avoids the interior vertices of earlier paths. The exact
//! Menger count (no length bound) is reported next to it as an upper
//! reference.

use alloc::vec;
use alloc::vec::Vec;

use super::flow::vertex_disjoint_count;
use crate::graph::{edge_subgraph, WeightedMultiGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Also run the exact max-flow count per edge.
    pub menger: bool,
    /// Stop peeling once the required count is reached.
    pub early_stop: bool,
    /// Check at most this many claims (evenly spaced over the list).
    pub max_edges: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            menger: false,
            early_stop: true,
            max_edges: None,
        }
    }
}

/// A claim that the endpoints of `edge` are joined in `G[F]` by `alpha`
/// vertex-disjoint paths of at most `beta_len` hops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathClaim {
    pub edge: usize,
    pub alpha: f64,
    pub beta_len: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCheck {
    pub edge: usize,
    pub required: usize,
    pub max_len: usize,
    pub peeled: usize,
    pub menger: Option<usize>,
}

impl EdgeCheck {
    pub fn passed(&self) -> bool {
        self.peeled >= self.required
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<EdgeCheck>,
    /// Claims skipped because of `max_edges`.
    pub unchecked: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn pass(&self) -> bool {
        self.failed() == 0
    }

    /// Fraction of checked claims that passed (1 when nothing was checked).
    pub fn pass_rate(&self) -> f64 {
        if self.checks.is_empty() {
            1.0
        } else {
            self.passed() as f64 / self.checks.len() as f64
        }
    }
}

struct Peeler {
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    blocked: Vec<u32>,
    seen: Vec<u32>,
    parent: Vec<usize>,
    stamp: u32,
}

impl Peeler {
    fn new(g: &WeightedMultiGraph, f: &[usize]) -> Self {
        let n = g.n();
        let mut deg = vec![0usize; n + 1];
        for &id in f {
            let e = g.edge(id);
            if !e.is_loop() {
                deg[e.u] += 1;
                deg[e.v] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut nbrs = vec![0usize; offsets[n]];
        for &id in f {
            let e = g.edge(id);
            if !e.is_loop() {
                nbrs[fill[e.u]] = e.v;
                fill[e.u] += 1;
                nbrs[fill[e.v]] = e.u;
                fill[e.v] += 1;
            }
        }
        Peeler {
            offsets,
            nbrs,
            blocked: vec![0; n],
            seen: vec![0; n],
            parent: vec![usize::MAX; n],
            stamp: 0,
        }
    }

    /// Greedy count of interior-disjoint `s`–`t` paths of at most `max_len`
    /// hops, stopping at `target` when given.
    fn peel(&mut self, s: usize, t: usize, max_len: usize, target: Option<usize>) -> usize {
        self.stamp += 1;
        let round = self.stamp;
        let mut count = 0;
        let mut direct_used = false;
        loop {
            if target.is_some_and(|k| count >= k) {
                return count;
            }
            self.stamp += 1;
            let st = self.stamp;
            self.seen[s] = st;
            let mut dist_t = None;
            // BFS by layers so the hop bound can cut the search short
            let mut frontier = vec![s];
            let mut hops = 0;
            'bfs: while !frontier.is_empty() && hops < max_len {
                hops += 1;
                let mut next = Vec::new();
                for &a in &frontier {
                    for &b in &self.nbrs[self.offsets[a]..self.offsets[a + 1]] {
                        if a == s && b == t && direct_used {
                            continue;
                        }
                        if b == t {
                            self.parent[t] = a;
                            dist_t = Some(hops);
                            break 'bfs;
                        }
                        if self.seen[b] == st || self.blocked[b] == round || b == s {
                            continue;
                        }
                        self.seen[b] = st;
                        self.parent[b] = a;
                        next.push(b);
                    }
                }
                frontier = next;
            }
            match dist_t {
                None => return count,
                Some(1) => direct_used = true,
                Some(_) => {
                    let mut x = self.parent[t];
                    while x != s {
                        self.blocked[x] = round;
                        x = self.parent[x];
                    }
                }
            }
            count += 1;
        }
    }
}

/// Checks that every edge of `g` outside `f` has `alpha` short disjoint
/// paths in `G[F]`.
pub fn verify_path_sparsifier(
    g: &WeightedMultiGraph,
    f: &[usize],
    alpha: f64,
    beta_len: f64,
    opts: VerifyOptions,
) -> VerifyReport {
    let mut in_f = vec![false; g.m()];
    f.iter().for_each(|&id| in_f[id] = true);
    let claims: Vec<PathClaim> = (0..g.m())
        .filter(|&id| !in_f[id] && !g.edge(id).is_loop())
        .map(|edge| PathClaim {
            edge,
            alpha,
            beta_len,
        })
        .collect();
    verify_claims(g, f, &claims, opts)
}

/// Checks a list of per-edge claims against `G[F]`.
pub fn verify_claims(
    g: &WeightedMultiGraph,
    f: &[usize],
    claims: &[PathClaim],
    opts: VerifyOptions,
) -> VerifyReport {
    let chosen: Vec<&PathClaim> = match opts.max_edges {
        Some(cap) if cap < claims.len() => {
            (0..cap).map(|i| &claims[i * claims.len() / cap]).collect()
        }
        _ => claims.iter().collect(),
    };
    let mut peeler = Peeler::new(g, f);
    let fg = if opts.menger {
        Some(edge_subgraph(g, f).expect("F holds valid edge ids").0)
    } else {
        None
    };
    let checks = chosen
        .iter()
        .map(|c| {
            let e = g.edge(c.edge);
            let required = libm::ceil(c.alpha - 1e-9).max(0.0) as usize;
            let max_len = libm::floor(c.beta_len + 1e-9).max(0.0) as usize;
            let target = if opts.early_stop {
                Some(required)
            } else {
                None
            };
            let peeled = peeler.peel(e.u, e.v, max_len, target);
            let menger = fg.as_ref().map(|h| vertex_disjoint_count(h, e.u, e.v));
            EdgeCheck {
                edge: c.edge,
                required,
                max_len,
                peeled,
                menger,
            }
        })
        .collect();
    VerifyReport {
        checks,
        unchecked: claims.len() - chosen.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn full_f_is_vacuous() {
        let g = generators::complete(5);
        let f: Vec<usize> = (0..g.m()).collect();
        let r = verify_path_sparsifier(&g, &f, 3.0, 2.0, VerifyOptions::default());
        assert!(r.checks.is_empty() && r.pass());
    }

    #[test]
    fn k4_minus_edge() {
        let g = generators::complete(4);
        // edge 0 is (0,1)
        let f: Vec<usize> = (1..6).collect();
        let opts = VerifyOptions {
            menger: true,
            early_stop: false,
            max_edges: None,
        };
        let r = verify_path_sparsifier(&g, &f, 2.0, 2.0, opts);
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].peeled, 2);
        assert_eq!(r.checks[0].menger, Some(2));
        assert!(r.pass());
        let r = verify_path_sparsifier(&g, &f, 2.0, 1.0, opts);
        assert!(!r.pass());
    }

    #[test]
    fn peeling_never_exceeds_menger() {
        let mut rng = crate::rng::seeded(8);
        for _ in 0..20 {
            let g = generators::gnp(25, 0.3, &mut rng);
            let f: Vec<usize> = (0..g.m()).filter(|id| id % 3 != 0).collect();
            let opts = VerifyOptions {
                menger: true,
                early_stop: false,
                max_edges: None,
            };
            let r = verify_path_sparsifier(&g, &f, 1.0, 25.0, opts);
            for c in &r.checks {
                assert!(c.peeled <= c.menger.unwrap());
            }
        }
    }

    #[test]
    fn max_edges_limits_work() {
        let g = generators::complete(10);
        let f: Vec<usize> = generators::random_spanning_tree(&g, &mut crate::rng::seeded(1));
        let opts = VerifyOptions {
            max_edges: Some(5),
            ..Default::default()
        };
        let r = verify_path_sparsifier(&g, &f, 1.0, 9.0, opts);
        assert_eq!(r.checks.len(), 5);
        assert_eq!(r.unchecked, g.m() - 9 - 5);
        assert!(r.pass());
    }
}
