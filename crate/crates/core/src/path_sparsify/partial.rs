use alloc::vec;
use alloc::vec::Vec;

use super::expander::{expander_decompose, ExpanderPiece};
use super::regular::regular_decomposition_sub;
use super::sampling::uniform_sample_graph;
use super::verify::PathClaim;
use crate::config::PathSparsifyConfig;
use crate::error::{Error, Result};
use crate::graph::WeightedMultiGraph;
use crate::rng::{split_from, Rng};

/// Path guarantee attached to one expander piece of the sampled graph.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceClaim {
    pub vertices: Vec<usize>,
    pub phi_cert: f64,
    pub exact: bool,
    /// Degree extremes of `G'{V_i}`, i.e. sampled degrees of the members.
    pub d_min: usize,
    pub d_max: usize,
    pub alpha: f64,
    pub beta_len: f64,
}

/// `α = φ·d_min / (8·d_ratio)` and `β = 2 + (4·d_ratio/φ)·max(0, ln(n/d_min))`.
pub fn expander_path_claim(phi: f64, d_min: usize, d_max: usize, n: usize) -> (f64, f64) {
    if d_min == 0 || phi <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let ratio = d_max as f64 / d_min as f64;
    let alpha = phi * d_min as f64 / (8.0 * ratio);
    let beta = 2.0 + 4.0 * ratio / phi * libm::log(n as f64 / d_min as f64).max(0.0);
    (alpha, beta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialPathSparsifier {
    pub p: f64,
    pub d: f64,
    /// Retained edges: the sampled edges inside expander pieces.
    pub f: Vec<usize>,
    /// Edges of `G` crossing pieces.
    pub e_cut: Vec<usize>,
    /// Edges inside a piece but not sampled, with the index of their claim.
    pub covered: Vec<(usize, usize)>,
    pub claims: Vec<PieceClaim>,
    pub sampled_edges: usize,
    /// Fraction of sampled edges the expander decomposition cut.
    pub sample_cut_fraction: f64,
}

impl PartialPathSparsifier {
    /// `|E_cut| ≤ |E| / 2`.
    pub fn cut_ok(&self, m: usize) -> bool {
        2 * self.e_cut.len() <= m
    }

    pub fn path_claims(&self) -> Vec<PathClaim> {
        self.covered
            .iter()
            .map(|&(edge, c)| PathClaim {
                edge,
                alpha: self.claims[c].alpha,
                beta_len: self.claims[c].beta_len,
            })
            .collect()
    }
}

/// Samples `G` uniformly, decomposes the sample into expanders and keeps the
/// sampled edges inside the pieces. `G` is read as simple and unweighted; `k`
/// may be fractional.
pub fn partial_path_sparsify(
    g: &WeightedMultiGraph,
    k: f64,
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<PartialPathSparsifier> {
    if !(k >= 1.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "k = {k} must be at least 1"
        )));
    }
    let all: Vec<usize> = (0..g.m()).filter(|&id| !g.edge(id).is_loop()).collect();
    let d_min = (0..g.n()).map(|v| g.edge_degree(v)).min().unwrap_or(0);
    let d = d_min as f64 / (10.0 * k);
    let sample = uniform_sample_graph(g, d, cfg.c_unif, rng);
    if sample.p >= 1.0 {
        return Ok(PartialPathSparsifier {
            p: 1.0,
            d,
            f: all,
            e_cut: Vec::new(),
            covered: Vec::new(),
            claims: Vec::new(),
            sampled_edges: g.m(),
            sample_cut_fraction: 0.0,
        });
    }
    let gp = &sample.graph;
    let dec = expander_decompose(gp, cfg.phi_target(gp.m()), cfg)?;
    let label = dec.piece_of(g.n());
    let claims: Vec<PieceClaim> = dec
        .pieces
        .iter()
        .map(
            |ExpanderPiece {
                 vertices,
                 phi_cert,
                 exact,
             }| {
                let d_min = vertices
                    .iter()
                    .map(|&v| gp.edge_degree(v))
                    .min()
                    .unwrap_or(0);
                let d_max = vertices
                    .iter()
                    .map(|&v| gp.edge_degree(v))
                    .max()
                    .unwrap_or(0);
                let (alpha, beta_len) =
                    expander_path_claim(*phi_cert, d_min, d_max, vertices.len());
                PieceClaim {
                    vertices: vertices.clone(),
                    phi_cert: *phi_cert,
                    exact: *exact,
                    d_min,
                    d_max,
                    alpha,
                    beta_len,
                }
            },
        )
        .collect();
    let mut sampled = vec![false; g.m()];
    sample.kept.iter().for_each(|&id| sampled[id] = true);
    let mut out = PartialPathSparsifier {
        p: sample.p,
        d,
        f: Vec::new(),
        e_cut: Vec::new(),
        covered: Vec::new(),
        claims,
        sampled_edges: sample.kept.len(),
        sample_cut_fraction: dec.cut_fraction(gp.m()),
    };
    for id in all {
        let e = g.edge(id);
        if label[e.u] != label[e.v] {
            out.e_cut.push(id);
        } else if sampled[id] {
            out.f.push(id);
        } else {
            out.covered.push((id, label[e.u]));
        }
    }
    Ok(out)
}

/// One pass of the outer loop.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTelemetry {
    pub remain_before: usize,
    pub d_avg: f64,
    pub pieces: usize,
    pub edges_in_pieces: usize,
    pub f_added: usize,
    pub covered_added: usize,
    pub remain_after: usize,
    /// Pieces whose `|E_cut| ≤ |E|/2` check failed.
    pub cut_violations: usize,
}

/// An input edge that is not kept, with the claim that justifies dropping it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveredEdge {
    pub edge: usize,
    pub alpha: f64,
    pub beta_len: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathSparsifier {
    /// `F ∪ E_remain` as sorted input edge ids.
    pub kept: Vec<usize>,
    pub covered: Vec<CoveredEdge>,
    /// Self-loops of the input; they need no paths and are not kept.
    pub dropped_loops: Vec<usize>,
    pub k_partial: f64,
    pub density_floor: f64,
    pub iterations: Vec<IterationTelemetry>,
    /// Why the loop ended early, if it did.
    pub stop_reason: Option<&'static str>,
}

impl PathSparsifier {
    pub fn claims(&self) -> Vec<PathClaim> {
        self.covered
            .iter()
            .map(|c| PathClaim {
                edge: c.edge,
                alpha: c.alpha,
                beta_len: c.beta_len,
            })
            .collect()
    }

    /// Minimum claimed path count over covered edges (`None` if none).
    pub fn min_alpha(&self) -> Option<f64> {
        self.covered.iter().map(|c| c.alpha).reduce(f64::min)
    }

    pub fn max_beta_len(&self) -> Option<f64> {
        self.covered.iter().map(|c| c.beta_len).reduce(f64::max)
    }
}

/// Repeats regular decomposition and partial sparsification while the
/// remaining edges are dense enough. Multi-edges are collapsed first; a
/// parallel copy is kept or covered together with its representative.
pub fn path_sparsify(
    g: &WeightedMultiGraph,
    k: usize,
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<PathSparsifier> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let n = g.n();
    let (simple, rep) = g.collapse_to_simple();
    let k_partial = cfg.k_partial(k, n);
    let floor = cfg.density_floor(n);
    let streams = split_from(rng);

    let mut remain: Vec<usize> = (0..simple.m()).collect();
    let mut f: Vec<usize> = Vec::new();
    let mut covered: Vec<(usize, f64, f64)> = Vec::new();
    let mut iterations = Vec::new();
    let mut stop_reason = None;
    let mut in_piece = vec![false; simple.m()];

    while 2.0 * remain.len() as f64 / n.max(1) as f64 >= floor {
        let it = iterations.len();
        if it >= cfg.max_iterations {
            stop_reason = Some("iteration cap");
            break;
        }
        let mut rd_rng = streams.stream(&[it as u64, 0]);
        let pieces = match regular_decomposition_sub(&simple, &remain, cfg, &mut rd_rng) {
            Ok((pieces, _)) => pieces,
            Err(Error::Degenerate(_)) => {
                stop_reason = Some("regular decomposition degenerate");
                break;
            }
            Err(e) => return Err(e),
        };
        let mut tel = IterationTelemetry {
            remain_before: remain.len(),
            d_avg: 2.0 * remain.len() as f64 / n as f64,
            pieces: pieces.len(),
            edges_in_pieces: 0,
            f_added: 0,
            covered_added: 0,
            remain_after: 0,
            cut_violations: 0,
        };
        let mut next_remain = Vec::new();
        for (pi, piece) in pieces.iter().enumerate() {
            piece.edges.iter().for_each(|&id| in_piece[id] = true);
            tel.edges_in_pieces += piece.edges.len();
            let (pg, map) = piece.to_graph(&simple);
            let mut prng = streams.stream(&[it as u64, 1, pi as u64]);
            let res = partial_path_sparsify(&pg, k_partial, cfg, &mut prng)?;
            tel.cut_violations += usize::from(!res.cut_ok(pg.m()));
            f.extend(res.f.iter().map(|&i| map.edge_to_parent[i]));
            tel.f_added += res.f.len();
            next_remain.extend(res.e_cut.iter().map(|&i| map.edge_to_parent[i]));
            for &(i, c) in &res.covered {
                covered.push((
                    map.edge_to_parent[i],
                    res.claims[c].alpha,
                    res.claims[c].beta_len,
                ));
            }
            tel.covered_added += res.covered.len();
        }
        next_remain.extend(remain.iter().copied().filter(|&id| !in_piece[id]));
        remain.iter().for_each(|&id| in_piece[id] = false);
        next_remain.sort_unstable();
        tel.remain_after = next_remain.len();
        iterations.push(tel);
        let stalled = next_remain.len() >= remain.len();
        remain = next_remain;
        if stalled {
            stop_reason = Some("no progress");
            break;
        }
    }

    // translate back to the input's edge ids
    let mut status = vec![0u8; simple.m()]; // 1 kept, 2 covered
    let mut claim_of = vec![(0.0, 0.0); simple.m()];
    f.iter().chain(&remain).for_each(|&s| status[s] = 1);
    for &(s, a, b) in &covered {
        status[s] = 2;
        claim_of[s] = (a, b);
    }
    let mut kept = Vec::new();
    let mut out_cov = Vec::new();
    let mut dropped_loops = Vec::new();
    let mut rep_of_simple = vec![usize::MAX; simple.m()];
    rep.iter()
        .enumerate()
        .for_each(|(s, &orig)| rep_of_simple[s] = orig);
    let mut pair_to_simple = alloc::collections::BTreeMap::new();
    for (s, e) in simple.edges().iter().enumerate() {
        pair_to_simple.insert((e.u.min(e.v), e.u.max(e.v)), s);
    }
    for (id, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            dropped_loops.push(id);
            continue;
        }
        let s = pair_to_simple[&(e.u.min(e.v), e.u.max(e.v))];
        match (status[s], rep_of_simple[s] == id) {
            (1, true) => kept.push(id),
            (1, false) => out_cov.push(CoveredEdge {
                edge: id,
                alpha: 1.0,
                beta_len: 1.0,
            }),
            (2, _) => out_cov.push(CoveredEdge {
                edge: id,
                alpha: claim_of[s].0,
                beta_len: claim_of[s].1,
            }),
            _ => unreachable!("every simple edge is kept or covered"),
        }
    }
    Ok(PathSparsifier {
        kept,
        covered: out_cov,
        dropped_loops,
        k_partial,
        density_floor: floor,
        iterations,
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::build_graph;
    use crate::path_sparsify::verify::{verify_claims, VerifyOptions};

    #[test]
    fn sparse_input_short_circuits() {
        let g = generators::cycle(30);
        let r = partial_path_sparsify(
            &g,
            1.0,
            &PathSparsifyConfig::desk(),
            &mut crate::rng::seeded(0),
        )
        .unwrap();
        assert_eq!(r.p, 1.0);
        assert_eq!(r.f.len(), 30);
        assert!(r.e_cut.is_empty());
    }

    #[test]
    fn complete_graph_partial() {
        let g = generators::complete(100);
        let mut cfg = PathSparsifyConfig::desk();
        cfg.c_unif = 0.5;
        let r = partial_path_sparsify(&g, 2.0, &cfg, &mut crate::rng::seeded(1)).unwrap();
        assert!(r.p < 1.0);
        assert!(r.cut_ok(g.m()));
        assert_eq!(r.f.len() + r.e_cut.len() + r.covered.len(), g.m());
        let rep = verify_claims(&g, &r.f, &r.path_claims(), VerifyOptions::default());
        assert!(rep.pass_rate() >= 0.95, "{}", rep.pass_rate());
        let again = partial_path_sparsify(&g, 2.0, &cfg, &mut crate::rng::seeded(1)).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn bridge_is_cut() {
        let a = 40;
        let g = generators::two_cliques_bridge(a);
        let mut cfg = PathSparsifyConfig::desk();
        cfg.c_unif = 0.5;
        cfg.expander_phi_coeff = 0.2 * libm::pow(libm::log(600.0), 3.0);
        let r = partial_path_sparsify(&g, 1.0, &cfg, &mut crate::rng::seeded(2)).unwrap();
        assert!(r.p < 1.0);
        let bridge = g.m() - 1;
        assert!(r.e_cut.contains(&bridge));
    }

    #[test]
    fn below_floor_keeps_everything() {
        let g = generators::grid(5, 5);
        let r = path_sparsify(
            &g,
            1,
            &PathSparsifyConfig::desk(),
            &mut crate::rng::seeded(0),
        )
        .unwrap();
        assert_eq!(r.kept, (0..g.m()).collect::<Vec<_>>());
        assert!(r.iterations.is_empty());
    }

    #[test]
    fn k200_sparsifies_with_valid_claims() {
        let g = generators::complete(200);
        let r = path_sparsify(
            &g,
            1,
            &PathSparsifyConfig::desk(),
            &mut crate::rng::seeded(3),
        )
        .unwrap();
        assert!(r.kept.len() < g.m());
        assert_eq!(r.kept.len() + r.covered.len(), g.m());
        let rep = verify_claims(
            &g,
            &r.kept,
            &r.claims(),
            VerifyOptions {
                max_edges: Some(300),
                ..Default::default()
            },
        );
        assert!(rep.pass_rate() >= 0.95, "{}", rep.pass_rate());
    }

    #[test]
    fn parallel_copies_follow_their_representative() {
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                edges.push((u, v, 1.0));
            }
        }
        edges.push((0, 1, 2.0));
        edges.push((3, 3, 1.0));
        let g = build_graph(6, edges).unwrap();
        let r = path_sparsify(
            &g,
            1,
            &PathSparsifyConfig::desk(),
            &mut crate::rng::seeded(0),
        )
        .unwrap();
        assert_eq!(r.dropped_loops, vec![16]);
        assert_eq!(r.kept, (0..15).collect::<Vec<_>>());
        assert_eq!(
            r.covered,
            vec![CoveredEdge {
                edge: 15,
                alpha: 1.0,
                beta_len: 1.0
            }]
        );
    }
}
