//! Degree regularization: trimming low-degree vertices, random bipartite
//! splitting, and the bucket-pair decomposition into near-regular pieces.
//!
//! All routines work on subsets of a host graph's edges, identified by edge
//! id, and treat the host as unweighted and simple.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::config::PathSparsifyConfig;
use crate::error::{Error, Result};
use crate::graph::{edge_subgraph, induced_subgraph, SubgraphMap, WeightedMultiGraph};
use crate::rng::Rng;

/// An edge-disjoint piece produced by the regular decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularPiece {
    /// Vertices of the piece (host ids, sorted).
    pub vertices: Vec<usize>,
    /// Edges of the piece (host ids, ascending).
    pub edges: Vec<usize>,
    pub d_min: usize,
    pub d_max: usize,
}

impl RegularPiece {
    pub fn d_ratio(&self) -> f64 {
        if self.d_min == 0 {
            f64::INFINITY
        } else {
            self.d_max as f64 / self.d_min as f64
        }
    }

    pub fn volume(&self) -> usize {
        2 * self.edges.len()
    }

    /// The piece as a standalone graph on `0..vertices.len()`.
    pub fn to_graph(&self, host: &WeightedMultiGraph) -> (WeightedMultiGraph, SubgraphMap) {
        let (sub, emap) = edge_subgraph(host, &self.edges).expect("piece edges are valid host ids");
        let (g, vmap) = induced_subgraph(&sub, &self.vertices).expect("piece vertices are valid");
        let edge_to_parent = vmap
            .edge_to_parent
            .iter()
            .map(|&i| emap.edge_to_parent[i])
            .collect();
        (
            g,
            SubgraphMap {
                vertex_to_parent: vmap.vertex_to_parent,
                edge_to_parent,
            },
        )
    }
}

/// Scratch view of `(vertices, edges)` inside a host graph.
pub(crate) struct EdgeView<'a> {
    pub host: &'a WeightedMultiGraph,
}

impl<'a> EdgeView<'a> {
    pub(crate) fn degrees(&self, edges: &[usize]) -> Vec<usize> {
        let mut d = vec![0usize; self.host.n()];
        for &id in edges {
            let e = self.host.edge(id);
            if !e.is_loop() {
                d[e.u] += 1;
                d[e.v] += 1;
            }
        }
        d
    }
}

fn piece_from(
    host: &WeightedMultiGraph,
    vertices: Vec<usize>,
    mut edges: Vec<usize>,
) -> RegularPiece {
    edges.sort_unstable();
    let d = EdgeView { host }.degrees(&edges);
    let d_min = vertices.iter().map(|&v| d[v]).min().unwrap_or(0);
    let d_max = vertices.iter().map(|&v| d[v]).max().unwrap_or(0);
    RegularPiece {
        vertices,
        edges,
        d_min,
        d_max,
    }
}

/// Repeatedly removes a vertex whose degree inside the current subgraph is
/// below `c · d_avg`, where `d_avg = 2|edges| / |vertices|` is fixed at entry.
/// Returns the surviving vertices (sorted) and the edges among them.
pub(crate) fn degree_lowerbound_sub(
    host: &WeightedMultiGraph,
    vertices: &[usize],
    edges: &[usize],
    c: f64,
) -> (Vec<usize>, Vec<usize>) {
    if vertices.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let d_avg = 2.0 * edges.len() as f64 / vertices.len() as f64;
    let threshold = c * d_avg;
    let mut member = vec![false; host.n()];
    vertices.iter().for_each(|&v| member[v] = true);
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); host.n()];
    let mut deg = vec![0usize; host.n()];
    for &id in edges {
        let e = host.edge(id);
        if e.is_loop() {
            continue;
        }
        inc[e.u].push(id);
        inc[e.v].push(id);
        deg[e.u] += 1;
        deg[e.v] += 1;
    }
    let mut alive = member.clone();
    let mut stack: Vec<usize> = vertices
        .iter()
        .copied()
        .filter(|&v| (deg[v] as f64) < threshold)
        .collect();
    let mut queued = vec![false; host.n()];
    stack.iter().for_each(|&v| queued[v] = true);
    while let Some(a) = stack.pop() {
        alive[a] = false;
        for &id in &inc[a] {
            let b = host.edge(id).other(a);
            if alive[b] {
                deg[b] -= 1;
                if (deg[b] as f64) < threshold && !queued[b] {
                    queued[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    let kept_v: Vec<usize> = {
        let mut v: Vec<usize> = vertices.iter().copied().filter(|&v| alive[v]).collect();
        v.sort_unstable();
        v
    };
    let kept_e = edges
        .iter()
        .copied()
        .filter(|&id| {
            let e = host.edge(id);
            alive[e.u] && alive[e.v]
        })
        .collect();
    (kept_v, kept_e)
}

/// Trims `g` until every remaining vertex has degree at least `c · d_avg(g)`.
pub fn degree_lowerbound(
    g: &WeightedMultiGraph,
    c: f64,
) -> Result<(WeightedMultiGraph, SubgraphMap)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidInput(format!("c = {c} outside (0,1)")));
    }
    let all_v: Vec<usize> = (0..g.n()).collect();
    let all_e: Vec<usize> = (0..g.m()).collect();
    let (v, e) = degree_lowerbound_sub(g, &all_v, &all_e, c);
    let (sub, emap) = edge_subgraph(g, &e)?;
    let (out, vmap) = induced_subgraph(&sub, &v)?;
    let edge_to_parent = vmap
        .edge_to_parent
        .iter()
        .map(|&i| emap.edge_to_parent[i])
        .collect();
    Ok((
        out,
        SubgraphMap {
            vertex_to_parent: vmap.vertex_to_parent,
            edge_to_parent,
        },
    ))
}

/// One side of a bipartite split: the left part `L_i` and the edges of
/// `G(L_i ∪ R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPart {
    pub left: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Outcome of a successful split together with how many attempts it took.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitResult {
    pub parts: Vec<SplitPart>,
    pub attempts: usize,
}

/// Randomly assigns every left vertex to one of `k` parts until each right
/// degree and each part size lands in the `[1/(2k), 3/(2k)]` window of its
/// total. All edges must join `left` to `right`.
pub fn bipartite_split(
    host: &WeightedMultiGraph,
    left: &[usize],
    right: &[usize],
    edges: &[usize],
    k: usize,
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<SplitResult> {
    if k == 0 || k > left.len().max(1) {
        return Err(Error::InvalidInput(format!("k = {k} outside [1, |L|]")));
    }
    if k == 1 {
        return Ok(SplitResult {
            parts: vec![SplitPart {
                left: left.to_vec(),
                edges: edges.to_vec(),
            }],
            attempts: 1,
        });
    }
    let n = left.len() + right.len();
    let c_split = cfg.c_split(n);
    let deg = EdgeView { host }.degrees(edges);
    if right
        .iter()
        .any(|&b| (deg[b] as f64) / (k as f64) < c_split)
        || (left.len() as f64) / (k as f64) < c_split
    {
        return Err(Error::Degenerate(format!(
            "bipartite split preconditions fail for k = {k}, c_split = {c_split:.3}"
        )));
    }
    let mut is_left = vec![false; host.n()];
    left.iter().for_each(|&a| is_left[a] = true);
    let mut part = vec![usize::MAX; host.n()];
    let kf = k as f64;
    for attempt in 1..=cfg.max_retries {
        for &a in left {
            part[a] = rng.gen_range(0..k);
        }
        let mut size = vec![0usize; k];
        left.iter().for_each(|&a| size[part[a]] += 1);
        let lo = left.len() as f64 / (2.0 * kf);
        let hi = 3.0 * left.len() as f64 / (2.0 * kf);
        let mut ok = size.iter().all(|&s| (s as f64) >= lo && (s as f64) <= hi);
        if ok {
            let mut rdeg = vec![0usize; right.len() * k];
            let mut ridx = vec![usize::MAX; host.n()];
            right.iter().enumerate().for_each(|(i, &b)| ridx[b] = i);
            for &id in edges {
                let e = host.edge(id);
                let (a, b) = if is_left[e.u] { (e.u, e.v) } else { (e.v, e.u) };
                rdeg[ridx[b] * k + part[a]] += 1;
            }
            ok = right.iter().enumerate().all(|(i, &b)| {
                let d = deg[b] as f64;
                (0..k).all(|p| {
                    let x = rdeg[i * k + p] as f64;
                    x >= d / (2.0 * kf) && x <= 3.0 * d / (2.0 * kf)
                })
            });
        }
        if ok {
            let mut parts = vec![
                SplitPart {
                    left: Vec::new(),
                    edges: Vec::new()
                };
                k
            ];
            for &a in left {
                parts[part[a]].left.push(a);
            }
            for &id in edges {
                let e = host.edge(id);
                let a = if is_left[e.u] { e.u } else { e.v };
                parts[part[a]].edges.push(id);
            }
            return Ok(SplitResult {
                parts,
                attempts: attempt,
            });
        }
    }
    Err(Error::Degenerate(format!(
        "bipartite split failed {} times",
        cfg.max_retries
    )))
}

/// Measured quantities for the bipartite decomposition guarantees.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteReport {
    pub early_return: bool,
    pub k: usize,
    pub vertex_total: usize,
    pub volume_kept: usize,
    pub volume_input: usize,
    /// `max(d_max^L / d_avg^L, d_max^R / d_avg^R)` of the input.
    pub c: f64,
    pub max_d_ratio: f64,
    pub min_d_min: usize,
    pub min_side_avg: f64,
    pub n: usize,
}

impl BipartiteReport {
    /// The four guarantees: vertex total ≤ 4n, kept volume ≥ Vol/8,
    /// `d_ratio ≤ 16c`, `d_min ≥ min(d_avg^L, d_avg^R)/16`.
    pub fn holds(&self) -> [bool; 4] {
        [
            self.vertex_total <= 4 * self.n,
            8 * self.volume_kept >= self.volume_input,
            self.max_d_ratio <= 16.0 * self.c + 1e-9,
            self.min_d_min as f64 >= self.min_side_avg / 16.0 - 1e-9,
        ]
    }
}

/// Splits a bipartite edge set into near-regular pieces.
///
/// Fails with [`Error::Degenerate`] when either side's average degree is below
/// the configured `c_bip`; callers skip such inputs.
pub fn decompose_bipartite(
    host: &WeightedMultiGraph,
    left: &[usize],
    right: &[usize],
    edges: &[usize],
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<(Vec<RegularPiece>, BipartiteReport)> {
    let n = left.len() + right.len();
    let deg = EdgeView { host }.degrees(edges);
    if left.is_empty() || right.is_empty() {
        return Err(Error::Degenerate("empty side".into()));
    }
    let d_l = edges.len() as f64 / left.len() as f64;
    let d_r = edges.len() as f64 / right.len() as f64;
    let c_bip = cfg.c_bip(n);
    if d_l < c_bip || d_r < c_bip {
        return Err(Error::Degenerate(format!(
            "side average degrees {d_l:.2}, {d_r:.2} below c_bip = {c_bip:.2}"
        )));
    }
    let c = {
        let ml = left.iter().map(|&a| deg[a]).max().unwrap_or(0) as f64;
        let mr = right.iter().map(|&b| deg[b]).max().unwrap_or(0) as f64;
        (ml / d_l).max(mr / d_r)
    };
    let (big, small, d_small) = if right.len() <= left.len() {
        (left, right, d_r)
    } else {
        (right, left, d_l)
    };
    let r_prime: Vec<usize> = small
        .iter()
        .copied()
        .filter(|&b| deg[b] as f64 >= d_small / 2.0)
        .collect();

    let mut report = BipartiteReport {
        early_return: false,
        k: 1,
        vertex_total: 0,
        volume_kept: 0,
        volume_input: 2 * edges.len(),
        c,
        max_d_ratio: 0.0,
        min_d_min: usize::MAX,
        min_side_avg: d_l.min(d_r),
        n,
    };

    let mut pieces = Vec::new();
    if 2 * r_prime.len() >= big.len() {
        report.early_return = true;
        let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
        all.sort_unstable();
        let (v, e) = degree_lowerbound_sub(host, &all, edges, 0.5);
        if !e.is_empty() {
            pieces.push(piece_from(host, v, e));
        }
    } else {
        let mut in_rp = vec![false; host.n()];
        r_prime.iter().for_each(|&b| in_rp[b] = true);
        let mut in_small = vec![false; host.n()];
        small.iter().for_each(|&b| in_small[b] = true);
        let g_prime: Vec<usize> = edges
            .iter()
            .copied()
            .filter(|&id| {
                let e = host.edge(id);
                let b = if in_small[e.u] { e.u } else { e.v };
                in_rp[b]
            })
            .collect();
        let k = big.len() / r_prime.len().max(1);
        report.k = k;
        let split = bipartite_split(host, big, &r_prime, &g_prime, k.max(1), cfg, rng)?;
        for part in split.parts {
            let mut vs: Vec<usize> = part.left.iter().chain(&r_prime).copied().collect();
            vs.sort_unstable();
            let (v, e) = degree_lowerbound_sub(host, &vs, &part.edges, 0.5);
            if !e.is_empty() {
                pieces.push(piece_from(host, v, e));
            }
        }
    }
    for p in &pieces {
        report.vertex_total += p.vertices.len();
        report.volume_kept += p.volume();
        report.max_d_ratio = report.max_d_ratio.max(p.d_ratio());
        report.min_d_min = report.min_d_min.min(p.d_min);
    }
    if pieces.is_empty() {
        report.min_d_min = 0;
    }
    Ok((pieces, report))
}

/// Trace of one regular decomposition.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegularReport {
    pub bucket_count: usize,
    /// `(i, j)` pairs that passed the volume test (1-based like the buckets).
    pub pairs_used: Vec<(usize, usize)>,
    pub pairs_skipped_volume: Vec<(usize, usize)>,
    pub pairs_skipped_degenerate: Vec<(usize, usize)>,
    pub vertex_total: usize,
    pub volume_kept: usize,
    pub volume_input: usize,
    pub d_avg: f64,
    pub max_d_ratio: f64,
    pub min_d_min: usize,
    pub n: usize,
}

impl RegularReport {
    /// Vertex total ≤ 4 n ln n, kept volume ≥ Vol/100, `d_ratio` within
    /// `scale·1000 ln(2n)`, `d_min ≥ d_avg / (250 ln n)`.
    pub fn holds(&self, ratio_scale: f64) -> [bool; 4] {
        let n = self.n as f64;
        let ln = libm::log(n).max(1.0);
        [
            self.vertex_total as f64 <= 4.0 * n * ln,
            100 * self.volume_kept >= self.volume_input,
            self.max_d_ratio <= ratio_scale * 1000.0 * libm::log(2.0 * n) + 1e-9,
            self.min_d_min as f64 >= self.d_avg / (250.0 * ln) - 1e-9,
        ]
    }
}

/// Buckets vertices by degree and decomposes each sufficiently heavy bucket
/// pair. The input must meet the configured density floor.
pub fn regular_decomposition(
    g: &WeightedMultiGraph,
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<(Vec<RegularPiece>, RegularReport)> {
    let all_e: Vec<usize> = (0..g.m()).filter(|&id| !g.edge(id).is_loop()).collect();
    regular_decomposition_sub(g, &all_e, cfg, rng)
}

pub(crate) fn regular_decomposition_sub(
    g: &WeightedMultiGraph,
    edges: &[usize],
    cfg: &PathSparsifyConfig,
    rng: &mut Rng,
) -> Result<(Vec<RegularPiece>, RegularReport)> {
    let n = g.n();
    let d_avg = 2.0 * edges.len() as f64 / n.max(1) as f64;
    let floor = cfg.density_floor(n);
    if d_avg < floor {
        return Err(Error::Degenerate(format!(
            "average degree {d_avg:.2} below density floor {floor:.2}"
        )));
    }
    let all_v: Vec<usize> = (0..n).collect();
    let (v1, e1) = degree_lowerbound_sub(g, &all_v, edges, 0.5);
    let deg = EdgeView { host: g }.degrees(&e1);

    let ln_n = libm::log(n as f64);
    let buckets = libm::floor(ln_n) as usize + 1;
    let mut bucket_of = vec![usize::MAX; n];
    let mut bucket_vol = vec![0usize; buckets + 1];
    for &v in &v1 {
        let d = deg[v] as f64;
        // degree in [e^{i-1}, e^i)
        let i = (libm::floor(libm::log(d)) as usize + 1).min(buckets);
        bucket_of[v] = i;
        bucket_vol[i] += deg[v];
    }

    let mut pair_edges: alloc::collections::BTreeMap<(usize, usize), Vec<usize>> =
        alloc::collections::BTreeMap::new();
    for &id in &e1 {
        let e = g.edge(id);
        let (a, b) = (bucket_of[e.u], bucket_of[e.v]);
        pair_edges.entry((a.min(b), a.max(b))).or_default().push(id);
    }
    let mut bucket_members: Vec<Vec<usize>> = vec![Vec::new(); buckets + 1];
    for &v in &v1 {
        bucket_members[bucket_of[v]].push(v);
    }

    let mut report = RegularReport {
        bucket_count: buckets,
        d_avg,
        n,
        volume_input: 2 * edges.len(),
        min_d_min: usize::MAX,
        ..Default::default()
    };
    let mut pieces = Vec::new();
    let two_ln = 2.0 * ln_n.max(f64::MIN_POSITIVE);
    for i in 1..=buckets {
        for j in i..=buckets {
            let es = match pair_edges.get(&(i, j)) {
                Some(es) => es,
                None => {
                    report.pairs_skipped_volume.push((i, j));
                    continue;
                }
            };
            let vol = 2.0 * es.len() as f64;
            if vol < bucket_vol[i] as f64 / two_ln || vol < bucket_vol[j] as f64 / two_ln {
                report.pairs_skipped_volume.push((i, j));
                continue;
            }
            if i == j {
                let (v, e) = degree_lowerbound_sub(g, &bucket_members[i], es, 0.5);
                if !e.is_empty() {
                    pieces.push(piece_from(g, v, e));
                }
                report.pairs_used.push((i, j));
            } else {
                match decompose_bipartite(g, &bucket_members[i], &bucket_members[j], es, cfg, rng) {
                    Ok((ps, _)) => {
                        pieces.extend(ps);
                        report.pairs_used.push((i, j));
                    }
                    Err(Error::Degenerate(_)) => report.pairs_skipped_degenerate.push((i, j)),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    for p in &pieces {
        report.vertex_total += p.vertices.len();
        report.volume_kept += p.volume();
        report.max_d_ratio = report.max_d_ratio.max(p.d_ratio());
        report.min_d_min = report.min_d_min.min(p.d_min);
    }
    if pieces.is_empty() {
        report.min_d_min = 0;
    }
    Ok((pieces, report))
}
