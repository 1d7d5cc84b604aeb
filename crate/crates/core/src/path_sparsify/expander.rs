//! Expander decomposition by recursive spectral partitioning.
//!
//! A vertex set `S` is accepted as a piece once half the second-smallest
//! eigenvalue of the normalized Laplacian of `G{S}` (the induced subgraph
//! padded with self-loops so every vertex keeps its degree in `G`) reaches
//! the target. Cheeger's inequality makes `λ₂/2` a lower bound on the edge
//! conductance of `G{S}`, so the recorded value is a certificate. Otherwise
//! the set is split along the best sweep cut of its Fiedler vector.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::config::PathSparsifyConfig;
use crate::error::Result;
use crate::graph::{induced_subgraph, Edge, SubgraphMap, WeightedMultiGraph};
use crate::oracle::symmetric_eigen;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpanderPiece {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Lower bound on the edge conductance of `G{vertices}`.
    pub phi_cert: f64,
    /// `false` when λ₂ came from the iterative estimate rather than a dense
    /// eigensolve; such a value is an estimate, not a proof.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpanderDecomposition {
    pub pieces: Vec<ExpanderPiece>,
    pub phi_target: f64,
    /// Non-loop edges whose endpoints lie in different pieces.
    pub cut_edges: usize,
    pub cut_weight: f64,
    /// Set when some branch hit the recursion cap and was shattered.
    pub depth_capped: bool,
}

impl ExpanderDecomposition {
    pub fn cut_fraction(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.cut_edges as f64 / m as f64
        }
    }

    pub fn piece_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, p) in self.pieces.iter().enumerate() {
            p.vertices.iter().for_each(|&v| out[v] = i);
        }
        out
    }
}

/// `G{S}`: the subgraph induced by `set` with one self-loop per vertex
/// carrying whatever degree the vertex lost.
pub fn self_looped_subgraph(
    g: &WeightedMultiGraph,
    set: &[usize],
) -> Result<(WeightedMultiGraph, SubgraphMap)> {
    let (sub, map) = induced_subgraph(g, set)?;
    let mut edges: Vec<Edge> = sub.edges().to_vec();
    for (i, &v) in map.vertex_to_parent.iter().enumerate() {
        let lost = g.degree(v) - sub.degree(i);
        if lost > 1e-12 * g.degree(v).max(1.0) {
            edges.push(Edge {
                u: i,
                v: i,
                w: lost,
            });
        }
    }
    Ok((WeightedMultiGraph::from_valid_edges(sub.n(), edges), map))
}

/// Edge conductance of a cut `mask` in `g` (loops count toward volume).
pub fn cut_conductance(g: &WeightedMultiGraph, mask: &[bool]) -> f64 {
    let vol_in: f64 = (0..g.n()).filter(|&v| mask[v]).map(|v| g.degree(v)).sum();
    let denom = vol_in.min(g.total_volume() - vol_in);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    g.cut_weight(mask) / denom
}

struct Local {
    verts: Vec<usize>,
    deg: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Local {
    fn new(g: &WeightedMultiGraph, verts: Vec<usize>, index: &mut [usize]) -> Self {
        verts.iter().enumerate().for_each(|(i, &v)| index[v] = i);
        let mut adj = vec![Vec::new(); verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            for &id in g.incident(v) {
                let e = g.edge(id);
                if e.is_loop() {
                    continue;
                }
                let j = index[e.other(v)];
                if j != usize::MAX {
                    adj[i].push((j, e.w));
                }
            }
        }
        let deg = verts.iter().map(|&v| g.degree(v)).collect();
        verts.iter().for_each(|&v| index[v] = usize::MAX);
        Local { verts, deg, adj }
    }

    fn len(&self) -> usize {
        self.verts.len()
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(a) = stack.pop() {
                comp.push(self.verts[a]);
                for &(b, _) in &self.adj[a] {
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// `y = D^{-1/2} L D^{-1/2} x` with `L` the loop-free Laplacian.
    fn normalized_apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            let si = 1.0 / libm::sqrt(self.deg[i]);
            let mut acc = 0.0;
            let mut internal = 0.0;
            for &(j, w) in &self.adj[i] {
                internal += w;
                acc -= w * x[j] / libm::sqrt(self.deg[j]);
            }
            y[i] = si * (internal * x[i] * si + acc);
        }
    }

    fn dense_lambda2(&self) -> (f64, Vec<f64>) {
        let n = self.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for &(j, w) in &self.adj[i] {
                let s = w / libm::sqrt(self.deg[i] * self.deg[j]);
                m[(i, i)] += w / self.deg[i];
                m[(i, j)] -= s;
            }
        }
        let e = symmetric_eigen(&m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let k = order[1];
        (
            e.eigenvalues[k],
            e.eigenvectors.column(k).iter().copied().collect(),
        )
    }

    /// Power iteration on `2I − N` with the trivial eigenvector deflated.
    fn iterative_lambda2(&self) -> (f64, Vec<f64>) {
        let n = self.len();
        let total: f64 = self.deg.iter().sum();
        let u0: Vec<f64> = self.deg.iter().map(|d| libm::sqrt(d / total)).collect();
        let deflate = |x: &mut [f64]| {
            let c: f64 = x.iter().zip(&u0).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(&u0).for_each(|(a, b)| *a -= c * b);
            let nrm = libm::sqrt(x.iter().map(|a| a * a).sum::<f64>());
            if nrm > 0.0 {
                x.iter_mut().for_each(|a| *a /= nrm);
            }
        };
        let mut x: Vec<f64> = (0..n)
            .map(|i| libm::sin(1.0 + i as f64 * 0.7548776662))
            .collect();
        deflate(&mut x);
        let mut y = vec![0.0; n];
        let mut rq = 2.0;
        for _ in 0..2000 {
            self.normalized_apply(&x, &mut y);
            let new_rq: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            for i in 0..n {
                y[i] = 2.0 * x[i] - y[i];
            }
            deflate(&mut y);
            core::mem::swap(&mut x, &mut y);
            if (rq - new_rq).abs() < 1e-12 {
                rq = new_rq;
                break;
            }
            rq = new_rq;
        }
        (rq, x)
    }

    /// Best prefix of the vertices sorted by `x_i / √d_i`, judged by the
    /// conductance inside `G{S}`.
    fn sweep(&self, x: &[f64]) -> Vec<usize> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let key: Vec<f64> = (0..n).map(|i| x[i] / libm::sqrt(self.deg[i])).collect();
        order.sort_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
        let total: f64 = self.deg.iter().sum();
        let mut in_prefix = vec![false; n];
        let (mut cut, mut vol) = (0.0, 0.0);
        let (mut best, mut best_at) = (f64::INFINITY, 1);
        for (pos, &i) in order.iter().enumerate().take(n - 1) {
            in_prefix[i] = true;
            vol += self.deg[i];
            for &(j, w) in &self.adj[i] {
                cut += if in_prefix[j] { -w } else { w };
            }
            let phi = cut / vol.min(total - vol);
            if phi < best {
                best = phi;
                best_at = pos + 1;
            }
        }
        let mut side: Vec<usize> = order[..best_at].iter().map(|&i| self.verts[i]).collect();
        side.sort_unstable();
        side
    }
}

/// Partitions the vertices of `g` into pieces whose certified conductance is
/// at least `phi_target`, or into singletons where recursion runs out.
pub fn expander_decompose(
    g: &WeightedMultiGraph,
    phi_target: f64,
    cfg: &PathSparsifyConfig,
) -> Result<ExpanderDecomposition> {
    let n = g.n();
    let mut index = vec![usize::MAX; n];
    let mut pieces = Vec::new();
    let mut depth_capped = false;
    let singleton = |v: usize| ExpanderPiece {
        vertices: vec![v],
        phi_cert: 1.0,
        exact: true,
    };

    let mut stack: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut nonisolated = Vec::new();
    for v in 0..n {
        if g.degree(v) > 0.0 && g.incident(v).iter().any(|&id| !g.edge(id).is_loop()) {
            nonisolated.push(v);
        } else {
            pieces.push(singleton(v));
        }
    }
    if !nonisolated.is_empty() {
        stack.push((nonisolated, 0));
    }
    while let Some((set, depth)) = stack.pop() {
        if set.len() == 1 {
            pieces.push(singleton(set[0]));
            continue;
        }
        let local = Local::new(g, set, &mut index);
        let comps = local.components();
        if comps.len() > 1 {
            stack.extend(comps.into_iter().map(|c| (c, depth)));
            continue;
        }
        let exact = local.len() <= cfg.exact_eigen_cap;
        let (lambda2, x) = if exact {
            local.dense_lambda2()
        } else {
            local.iterative_lambda2()
        };
        let phi = (lambda2 / 2.0 - 1e-12).max(0.0);
        if phi >= phi_target {
            pieces.push(ExpanderPiece {
                vertices: local.verts,
                phi_cert: phi.min(1.0),
                exact,
            });
        } else if depth >= cfg.expander_max_depth {
            depth_capped = true;
            pieces.extend(local.verts.iter().map(|&v| singleton(v)));
        } else {
            let side = local.sweep(&x);
            let rest: Vec<usize> = {
                side.iter().for_each(|&v| index[v] = 0);
                let r = local
                    .verts
                    .iter()
                    .copied()
                    .filter(|&v| index[v] == usize::MAX)
                    .collect();
                side.iter().for_each(|&v| index[v] = usize::MAX);
                r
            };
            stack.push((rest, depth + 1));
            stack.push((side, depth + 1));
        }
    }
    pieces.sort_by_key(|p| p.vertices[0]);
    let mut out = ExpanderDecomposition {
        pieces,
        phi_target,
        cut_edges: 0,
        cut_weight: 0.0,
        depth_capped,
    };
    let label = out.piece_of(n);
    for e in g.edges() {
        if label[e.u] != label[e.v] {
            out.cut_edges += 1;
            out.cut_weight += e.w;
        }
    }
    Ok(out)
}
