//! Ultrasparse distortion subgraphs with leverage overestimates.
//!
//! Edges are bucketed by weight class. Windows of consecutive buckets are
//! decomposed on the graph obtained by contracting the forest built so far;
//! every piece contributes its trees to the forest and a path sparsifier of
//! the contracted piece to the kept set. Edges inside a piece are settled,
//! a few edges per bucket are kept outright and the oldest bucket of the
//! window is given up into the kept set.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::{PathSparsifyConfig, SubgraphConfig, TauRule};
use crate::decompose::decompose;
use crate::error::{invalid, Result};
use crate::graph::{
    edge_subgraph, induced_subgraph, quotient_by_groups, Edge, UnionFind, WeightedMultiGraph,
};
use crate::oracle::PseudoInverse;
use crate::path_sparsify::path_sparsify;
use crate::rng::{split_from, Rng};

fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Callback building a path sparsifier of an unweighted multigraph; returns
/// the kept edge ids.
pub type PathSparsifyFn<'a> = dyn FnMut(&WeightedMultiGraph, &mut Rng) -> Result<Vec<usize>> + 'a;

/// The library path sparsifier with the given `k` and constants.
pub fn default_path_sparsifier(
    k: usize,
    cfg: PathSparsifyConfig,
) -> impl FnMut(&WeightedMultiGraph, &mut Rng) -> Result<Vec<usize>> {
    move |g, rng| Ok(path_sparsify(g, k, &cfg, rng)?.kept)
}

/// A sparsifier that keeps every non-loop edge.
pub fn keep_all(g: &WeightedMultiGraph, _: &mut Rng) -> Result<Vec<usize>> {
    Ok((0..g.m()).filter(|&id| !g.edge(id).is_loop()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AkpwParams {
    pub k: f64,
    pub p: f64,
    pub beta: f64,
    pub sigma: usize,
    pub delta: f64,
}

impl AkpwParams {
    /// `β = (49 ln²k)^{−p/(1−p)}`, `σ = ⌈ln k / ln(1/β)⌉`, `δ = 48σ ln k / β`.
    pub fn derived(k: f64, p: f64) -> Result<Self> {
        check_kp(k, p)?;
        let lk = ln(k);
        let beta = libm::pow(49.0 * lk * lk, -p / (1.0 - p));
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid(format!(
                "β = {beta} outside (0,1) for k = {k}, p = {p}"
            )));
        }
        let sigma = (libm::ceil(lk / ln(1.0 / beta)) as usize).max(1);
        let delta = 48.0 * sigma as f64 * lk / beta;
        let out = AkpwParams {
            k,
            p,
            beta,
            sigma,
            delta,
        };
        if !out.converges() {
            return Err(invalid(format!(
                "βδ^p = {} is not below 1 for k = {k}, p = {p}",
                out.geometric_rate()
            )));
        }
        Ok(out)
    }

    /// The derived values with any overrides from `cfg` applied. An
    /// overridden `β` also re-derives `σ` unless `σ` is overridden too.
    pub fn with_config(k: f64, p: f64, cfg: &SubgraphConfig) -> Result<Self> {
        if cfg.beta.is_none() && cfg.sigma.is_none() && cfg.delta.is_none() {
            return Self::derived(k, p);
        }
        check_kp(k, p)?;
        let lk = ln(k);
        let beta = match cfg.beta {
            Some(b) => b,
            None => libm::pow(49.0 * lk * lk, -p / (1.0 - p)),
        };
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid(format!("β = {beta} outside (0,1)")));
        }
        let sigma = cfg
            .sigma
            .unwrap_or_else(|| (libm::ceil(lk / ln(1.0 / beta)) as usize).max(1));
        if sigma == 0 {
            return Err(invalid("σ must be at least 1"));
        }
        let delta = cfg.delta.unwrap_or(48.0 * sigma as f64 * lk / beta);
        if !(delta > 1.0) {
            return Err(invalid(format!("δ = {delta} must exceed 1")));
        }
        Ok(AkpwParams {
            k,
            p,
            beta,
            sigma,
            delta,
        })
    }

    pub fn geometric_rate(&self) -> f64 {
        self.beta * libm::pow(self.delta, self.p)
    }

    pub fn converges(&self) -> bool {
        self.geometric_rate() < 1.0
    }

    pub fn decompose_beta(&self) -> f64 {
        self.beta / 6.0
    }

    pub fn decompose_radius(&self) -> usize {
        libm::floor(self.delta / 4.0) as usize
    }
}

fn check_kp(k: f64, p: f64) -> Result<()> {
    if !(k > 1.0 && k.is_finite()) {
        return Err(invalid(format!("k = {k} must exceed 1")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p = {p} outside (0,1)")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePartition {
    /// 1-based bucket of every edge.
    pub bucket: Vec<usize>,
    pub count: usize,
}

impl EdgePartition {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.count];
        for &b in &self.bucket {
            s[b - 1] += 1;
        }
        s
    }
}

/// Bucket `i` holds the edges with `w_max / w_e ∈ [δ^{i−1}, δ^i)`.
pub fn bucket_edges(g: &WeightedMultiGraph, delta: f64) -> Result<EdgePartition> {
    if !(delta > 1.0 && delta.is_finite()) {
        return Err(invalid(format!("δ = {delta} must exceed 1")));
    }
    let w_max = g.max_weight();
    let ld = ln(delta);
    let mut bucket = Vec::with_capacity(g.m());
    for e in g.edges() {
        let ell = w_max / e.w;
        let mut i = libm::floor(ln(ell) / ld).max(0.0) as i32;
        // snap exact powers of δ that rounding put on the wrong side
        while i > 0 && libm::pow(delta, i as f64) > ell * (1.0 + 1e-12) {
            i -= 1;
        }
        while libm::pow(delta, (i + 1) as f64) <= ell * (1.0 + 1e-12) {
            i += 1;
        }
        bucket.push(i as usize + 1);
    }
    let count = bucket.iter().copied().max().unwrap_or(0);
    Ok(EdgePartition { bucket, count })
}

fn check_weight_ratio(g: &WeightedMultiGraph, exponent: f64) -> Result<()> {
    if g.m() == 0 {
        return Ok(());
    }
    let ratio = g.max_weight() / g.min_weight();
    let bound = libm::pow(g.n().max(2) as f64, exponent);
    if ratio > bound {
        return Err(invalid(format!(
            "weight ratio {ratio:e} exceeds n^{exponent} = {bound:e}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AugmentResult {
    /// Edge ids of `G` joining different trees.
    pub kept: Vec<usize>,
    /// How many of them were added to reconnect the contracted graph after
    /// the path sparsifier.
    pub repaired: usize,
}

/// Contracts each tree, runs the path sparsifier on the contracted
/// unweighted multigraph and maps the kept edges back. The kept set is then
/// topped up with a spanning forest so that it connects whatever the
/// contracted graph connects.
pub fn augment_tree(
    g: &WeightedMultiGraph,
    trees: &[Vec<usize>],
    sparsifier: &mut PathSparsifyFn<'_>,
    rng: &mut Rng,
) -> Result<AugmentResult> {
    let (q, _) = quotient_by_groups(g, trees)
        .map_err(|e| invalid(format!("forest is not a partition: {e}")))?;
    if trees.len() <= 1 {
        return Ok(AugmentResult::default());
    }
    let q = q.to_unweighted();
    let mut kept = sparsifier(&q, rng)?;
    kept.retain(|&id| id < q.m() && !q.edge(id).is_loop());
    kept.sort_unstable();
    kept.dedup();
    let mut uf = UnionFind::new(q.n());
    for &id in &kept {
        let e = q.edge(id);
        uf.union(e.u, e.v);
    }
    let mut repaired = 0;
    for (id, e) in q.edges().iter().enumerate() {
        if uf.union(e.u, e.v) {
            kept.push(id);
            repaired += 1;
        }
    }
    kept.sort_unstable();
    Ok(AugmentResult { kept, repaired })
}

/// Path resistances in a spanning forest, answered through binary lifting.
#[derive(Clone, Debug)]
pub struct TreeResistance {
    depth: Vec<u32>,
    dist: Vec<f64>,
    comp: Vec<usize>,
    up: Vec<Vec<u32>>,
    /// Edge ids of the forest.
    pub edges: Vec<usize>,
}

impl TreeResistance {
    /// Greedy spanning forest over `order` (a list of edge ids), skipping
    /// loops and edges that would close a cycle.
    pub fn new(g: &WeightedMultiGraph, order: &[usize]) -> Self {
        let n = g.n();
        let mut uf = UnionFind::new(n);
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for &id in order {
            let e = g.edge(id);
            if !e.is_loop() && uf.union(e.u, e.v) {
                adj[e.u].push((e.v, 1.0 / e.w));
                adj[e.v].push((e.u, 1.0 / e.w));
                edges.push(id);
            }
        }
        let mut depth = vec![0u32; n];
        let mut dist = vec![0.0; n];
        let mut comp = vec![usize::MAX; n];
        let mut parent = vec![0u32; n];
        let mut stack = Vec::new();
        for root in 0..n {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = root;
            parent[root] = root as u32;
            stack.push(root);
            while let Some(x) = stack.pop() {
                for &(y, r) in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = root;
                        parent[y] = x as u32;
                        depth[y] = depth[x] + 1;
                        dist[y] = dist[x] + r;
                        stack.push(y);
                    }
                }
            }
        }
        let levels = (usize::BITS - n.max(1).leading_zeros()) as usize;
        let mut up = vec![parent];
        for j in 1..levels.max(1) {
            let prev = &up[j - 1];
            let next = (0..n).map(|v| prev[prev[v] as usize]).collect();
            up.push(next);
        }
        TreeResistance {
            depth,
            dist,
            comp,
            up,
            edges,
        }
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.comp[u] == self.comp[v]
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            core::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[j][u] as usize;
            }
            diff >>= 1;
            j += 1;
        }
        if u == v {
            return u;
        }
        for j in (0..self.up.len()).rev() {
            let (a, b) = (self.up[j][u], self.up[j][v]);
            if a != b {
                u = a as usize;
                v = b as usize;
            }
        }
        self.up[0][u] as usize
    }

    /// Resistance of the forest path from `u` to `v`; infinite across
    /// components.
    pub fn resistance(&self, u: usize, v: usize) -> f64 {
        if !self.connected(u, v) {
            return f64::INFINITY;
        }
        let a = self.lca(u, v);
        (self.dist[u] + self.dist[v] - 2.0 * self.dist[a]).max(0.0)
    }
}

/// Largest path resistance inside any component of the forest `f`.
fn forest_diameter(g: &WeightedMultiGraph, f: &[usize]) -> f64 {
    let n = g.n();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &id in f {
        let e = g.edge(id);
        adj[e.u].push((e.v, 1.0 / e.w));
        adj[e.v].push((e.u, 1.0 / e.w));
    }
    let mut dist = vec![f64::NAN; n];
    let mut dist2 = vec![f64::NAN; n];
    let mut best: f64 = 0.0;
    let far = |src: usize, dist: &mut Vec<f64>| -> (usize, Vec<usize>) {
        let mut stack = vec![src];
        let mut seen = vec![src];
        dist[src] = 0.0;
        let mut arg = src;
        while let Some(x) = stack.pop() {
            if dist[x] > dist[arg] {
                arg = x;
            }
            for &(y, r) in &adj[x] {
                if dist[y].is_nan() {
                    dist[y] = dist[x] + r;
                    stack.push(y);
                    seen.push(y);
                }
            }
        }
        (arg, seen)
    };
    for s in 0..n {
        if !dist[s].is_nan() || adj[s].is_empty() {
            continue;
        }
        let (a, _) = far(s, &mut dist);
        let (b, seen) = far(a, &mut dist2);
        best = best.max(dist2[b]);
        for v in seen {
            dist2[v] = 0.0;
        }
    }
    best
}

/// What happened in one pass of the main loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphIteration {
    pub t: usize,
    /// First bucket of the window (the last one is `t`).
    pub window_start: usize,
    pub contracted_vertices: usize,
    pub window_edges: usize,
    pub pieces: usize,
    pub trees: usize,
    pub forest_added: usize,
    pub sparsifier_added: usize,
    pub repaired: usize,
    pub settled: usize,
    pub extra_kept: usize,
    pub dumped: usize,
    /// `(bucket, alive before, alive after)` over the window.
    pub bucket_decay: Vec<(usize, usize, usize)>,
    /// Largest path resistance inside a component of the forest.
    pub forest_diameter: f64,
    /// `δ^{t+1} / w_max`.
    pub forest_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionSubgraph {
    /// Edge ids of `G` kept in `H`, sorted.
    pub h: Vec<usize>,
    /// Overestimate of `w_e R_H(e)` for every edge; 1 on `H`, 0 on loops.
    pub tau: Vec<f64>,
    /// The settlement value `4 w_e δ^{t+1} / w_max` (1 on `H`).
    pub tau_paper: Vec<f64>,
    /// Tree-path stretch through a spanning forest of `H` (1 on `H`).
    pub tau_stretch: Vec<f64>,
    pub p: f64,
    pub kappa_measured: f64,
    pub params: AkpwParams,
    pub rule: TauRule,
    pub buckets: usize,
    pub forest_edges: usize,
    pub iterations: Vec<SubgraphIteration>,
    /// Edges whose settlement value fell below the tree-path stretch.
    pub paper_below_stretch: usize,
    /// Edges added to `H` at the end because `H` did not connect them.
    pub forced: usize,
}

impl DistortionSubgraph {
    pub fn graph(&self, g: &WeightedMultiGraph) -> WeightedMultiGraph {
        edge_subgraph(g, &self.h).expect("H holds valid edge ids").0
    }

    pub fn tau_norm_p(&self) -> f64 {
        self.kappa_measured
    }

    /// `n + sparsity_coeff · m / k`.
    pub fn sparsity_budget(&self, g: &WeightedMultiGraph, cfg: &SubgraphConfig) -> f64 {
        g.n() as f64 + cfg.sparsity_coeff * g.m() as f64 / self.params.k
    }
}

/// Builds `H` and `τ` for `G`.
pub fn spectral_subgraph(
    g: &WeightedMultiGraph,
    k: f64,
    p: f64,
    cfg: &SubgraphConfig,
    sparsifier: &mut PathSparsifyFn<'_>,
    rng: &mut Rng,
) -> Result<DistortionSubgraph> {
    let params = AkpwParams::with_config(k, p, cfg)?;
    check_weight_ratio(g, cfg.weight_ratio_exponent)?;
    let n = g.n();
    let m = g.m();
    let part = bucket_edges(g, params.delta)?;
    let nb = part.count;
    let w_max = if m > 0 { g.max_weight() } else { 1.0 };
    let extra = libm::floor(cfg.extra_coeff * m as f64 / (k * k)) as usize;
    let splitter = split_from(rng);

    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); nb + 1];
    let mut alive = vec![false; m];
    let mut alive_count = vec![0usize; nb + 1];
    for (id, live) in alive.iter_mut().enumerate() {
        if !g.edge(id).is_loop() {
            let b = part.bucket[id];
            lists[b].push(id);
            *live = true;
            alive_count[b] += 1;
        }
    }
    let mut in_h = vec![false; m];
    let mut in_f = vec![false; m];
    let mut f_edges = Vec::new();
    let mut tau_paper = vec![1.0; m];
    let mut uf = UnionFind::new(n);
    let mut iterations = Vec::new();

    let mut t = 1usize;
    while alive_count.iter().any(|&c| c > 0) {
        let lo = t.saturating_sub(params.sigma).max(1);
        let window: Vec<usize> = (lo..=t.min(nb))
            .flat_map(|j| lists[j].iter().copied())
            .filter(|&id| alive[id])
            .collect();
        if window.is_empty() {
            let next = (t + 1..=nb).find(|&j| alive_count[j] > 0).unwrap_or(t + 1);
            t = next.max(t + 1);
            continue;
        }
        let before: Vec<usize> = (lo..=t)
            .map(|j| if j <= nb { alive_count[j] } else { 0 })
            .collect();
        let (label, nt) = uf.labels();
        let mut window = window;
        window.sort_unstable();
        let gt = WeightedMultiGraph::from_valid_edges(
            nt,
            window
                .iter()
                .map(|&id| {
                    let e = g.edge(id);
                    Edge {
                        u: label[e.u],
                        v: label[e.v],
                        w: 1.0,
                    }
                })
                .collect(),
        );
        let rel: Vec<usize> = window.iter().map(|&id| part.bucket[id] - lo).collect();
        let dec = decompose(
            &gt,
            &rel,
            t - lo + 1,
            params.decompose_beta(),
            params.decompose_radius(),
        )?;

        let mut it = SubgraphIteration {
            t,
            window_start: lo,
            contracted_vertices: nt,
            window_edges: window.len(),
            pieces: dec.pieces.len(),
            trees: dec.tree_count(),
            forest_added: 0,
            sparsifier_added: 0,
            repaired: 0,
            settled: 0,
            extra_kept: 0,
            dumped: 0,
            bucket_decay: Vec::new(),
            forest_diameter: 0.0,
            forest_bound: libm::pow(params.delta, (t + 1) as f64) / w_max,
        };

        for (pi, piece) in dec.pieces.iter().enumerate() {
            let forest = &dec.trees[pi];
            for tree in &forest.trees {
                for local in tree.edge_ids() {
                    let id = window[local];
                    let e = g.edge(id);
                    uf.union(e.u, e.v);
                    if !in_f[id] {
                        in_f[id] = true;
                        in_h[id] = true;
                        f_edges.push(id);
                        it.forest_added += 1;
                    }
                }
            }
            if forest.trees.len() <= 1 {
                continue;
            }
            let (sub, map) = induced_subgraph(&gt, piece)?;
            let mut local_of = vec![usize::MAX; nt];
            for (i, &v) in piece.iter().enumerate() {
                local_of[v] = i;
            }
            let groups: Vec<Vec<usize>> = forest
                .trees
                .iter()
                .map(|tr| tr.vertices.iter().map(|&v| local_of[v]).collect())
                .collect();
            let mut prng = splitter.stream(&[t as u64, pi as u64]);
            let aug = augment_tree(&sub, &groups, sparsifier, &mut prng)?;
            it.repaired += aug.repaired;
            for local in aug.kept {
                let id = window[map.edge_to_parent[local]];
                if !in_h[id] {
                    in_h[id] = true;
                    it.sparsifier_added += 1;
                }
            }
        }

        // settle every remaining edge whose endpoints fall in one piece
        let piece_of = dec.piece_of(nt);
        let settle_scale = 4.0 * libm::pow(params.delta, (t + 1) as f64) / w_max;
        for id in 0..m {
            if !alive[id] {
                continue;
            }
            let e = g.edge(id);
            if piece_of[label[e.u]] == piece_of[label[e.v]] {
                alive[id] = false;
                alive_count[part.bucket[id]] -= 1;
                if !in_h[id] {
                    tau_paper[id] = settle_scale * e.w;
                }
                it.settled += 1;
            }
        }

        for j in (t + 1).saturating_sub(params.sigma).max(1)..=t.min(nb) {
            let mut taken = 0;
            for &id in &lists[j] {
                if taken == extra {
                    break;
                }
                if alive[id] {
                    alive[id] = false;
                    alive_count[j] -= 1;
                    in_h[id] = true;
                    taken += 1;
                }
            }
            it.extra_kept += taken;
        }
        if t > params.sigma && t - params.sigma <= nb {
            let j = t - params.sigma;
            for &id in &lists[j] {
                if alive[id] {
                    alive[id] = false;
                    in_h[id] = true;
                    it.dumped += 1;
                }
            }
            alive_count[j] = 0;
        }

        it.bucket_decay = (lo..=t)
            .zip(before)
            .map(|(j, b)| (j, b, if j <= nb { alive_count[j] } else { 0 }))
            .collect();
        it.forest_diameter = forest_diameter(g, &f_edges);
        iterations.push(it);
        t += 1;
    }

    // spanning forest of H: forest edges first, then the heaviest others
    let mut order = f_edges.clone();
    let mut rest: Vec<usize> = (0..m).filter(|&id| in_h[id] && !in_f[id]).collect();
    rest.sort_by(|&a, &b| g.edge(b).w.total_cmp(&g.edge(a).w).then(a.cmp(&b)));
    order.extend(rest);
    let tree = TreeResistance::new(g, &order);

    let mut forced = 0;
    let mut tau_stretch = vec![1.0; m];
    for id in 0..m {
        let e = g.edge(id);
        if e.is_loop() {
            tau_stretch[id] = 0.0;
            tau_paper[id] = 0.0;
        } else if !in_h[id] {
            let r = tree.resistance(e.u, e.v);
            if r.is_finite() {
                tau_stretch[id] = e.w * r;
            } else {
                in_h[id] = true;
                tau_paper[id] = 1.0;
                forced += 1;
            }
        }
    }
    let mut paper_below_stretch = 0;
    let tau: Vec<f64> = (0..m)
        .map(|id| {
            if in_h[id] {
                return 1.0;
            }
            if tau_paper[id] < tau_stretch[id] {
                paper_below_stretch += 1;
            }
            match cfg.tau_rule {
                TauRule::Paper => tau_paper[id],
                TauRule::TreeStretch => tau_stretch[id],
                TauRule::Min => tau_paper[id].min(tau_stretch[id]),
            }
        })
        .collect();
    let kappa_measured = tau
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| libm::pow(x, p))
        .sum();
    let h: Vec<usize> = (0..m).filter(|&id| in_h[id]).collect();
    Ok(DistortionSubgraph {
        h,
        tau,
        tau_paper,
        tau_stretch,
        p,
        kappa_measured,
        params,
        rule: cfg.tau_rule,
        buckets: nb,
        forest_edges: f_edges.len(),
        iterations,
        paper_below_stretch,
        forced,
    })
}

/// `Σ_e (w_e R_H(e))^p` by the dense resistance oracle. Loops contribute 0
/// and edges whose endpoints `H` leaves disconnected contribute infinity.
pub fn distortion(g: &WeightedMultiGraph, h: &[usize], p: f64) -> Result<f64> {
    let hg = edge_subgraph(g, h)?.0;
    let oracle = PseudoInverse::new(&hg)?;
    Ok(g.edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| libm::pow(e.w * oracle.resistance(e.u, e.v), p))
        .sum())
}
