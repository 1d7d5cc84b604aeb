//! Weighted multigraphs and the surgery primitives used throughout the crate.
//!
//! Edge ids are positions in the edge list and never change once a graph is
//! built. Derived graphs (induced subgraphs, quotients) carry explicit
//! translation tables back to the ids of the graph they came from.
//!
//! Self-loops count toward degree and volume (a loop of weight `w` adds `w`
//! to its vertex) but are invisible to the Laplacian.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x`. For a self-loop this is `x` itself.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug)]
pub struct WeightedMultiGraph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    incidence: Vec<usize>,
    degree: Vec<f64>,
}

/// Validates `edge_list` and builds the incidence index. Edge ids follow the
/// order of `edge_list`.
pub fn build_graph<I>(n: usize, edge_list: I) -> Result<WeightedMultiGraph>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    let mut edges = Vec::new();
    for (i, (u, v, w)) in edge_list.into_iter().enumerate() {
        if u >= n || v >= n {
            return Err(invalid(format!(
                "edge {i} = ({u},{v}) has an endpoint outside [0,{n})"
            )));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(invalid(format!(
                "edge {i} = ({u},{v}) has non-positive or non-finite weight {w}"
            )));
        }
        edges.push(Edge { u, v, w });
    }
    Ok(WeightedMultiGraph::from_valid_edges(n, edges))
}

impl WeightedMultiGraph {
    pub fn new<I>(n: usize, edge_list: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        build_graph(n, edge_list)
    }

    /// Unit-weight graph from endpoint pairs.
    pub fn unweighted<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        build_graph(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub(crate) fn from_valid_edges(n: usize, edges: Vec<Edge>) -> Self {
        let mut count = vec![0usize; n + 1];
        let mut degree = vec![0.0; n];
        for e in &edges {
            debug_assert!(e.u < n && e.v < n && e.w > 0.0 && e.w.is_finite());
            count[e.u] += 1;
            count[e.v] += 1;
            degree[e.u] += e.w;
            if !e.is_loop() {
                degree[e.v] += e.w;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + count[i];
        }
        let mut fill = offsets.clone();
        let mut incidence = vec![0usize; offsets[n]];
        for (id, e) in edges.iter().enumerate() {
            incidence[fill[e.u]] = id;
            fill[e.u] += 1;
            incidence[fill[e.v]] = id;
            fill[e.v] += 1;
        }
        WeightedMultiGraph {
            n,
            edges,
            offsets,
            incidence,
            degree,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    /// Edge ids incident to `v`, ascending. A self-loop appears twice.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(edge id, neighbour)` pairs around `v`, in ascending edge-id order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.incident(v)
            .iter()
            .map(move |&id| (id, self.edges[id].other(v)))
    }

    /// Weighted degree, self-loops counted once.
    pub fn degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// Number of non-loop incident edges (parallel edges counted separately).
    pub fn edge_degree(&self, v: usize) -> usize {
        self.incident(v)
            .iter()
            .filter(|&&id| !self.edges[id].is_loop())
            .count()
    }

    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.degree[v]).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.degree.iter().sum()
    }

    /// Total weight of edges with exactly one endpoint inside `mask`.
    pub fn cut_weight(&self, mask: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|e| mask[e.u] != mask[e.v])
            .map(|e| e.w)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(0.0, f64::max)
    }

    pub fn min_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(f64::INFINITY, f64::min)
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// Same topology, every weight set to 1.
    pub fn to_unweighted(&self) -> WeightedMultiGraph {
        let edges = self.edges.iter().map(|e| Edge { w: 1.0, ..*e }).collect();
        WeightedMultiGraph::from_valid_edges(self.n, edges)
    }

    /// `y = L x`, writing into a caller-owned buffer.
    pub fn laplacian_apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|t| *t = 0.0);
        for e in &self.edges {
            let d = e.w * (x[e.u] - x[e.v]);
            y[e.u] += d;
            y[e.v] -= d;
        }
    }

    /// `xᵀ L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.w * d * d
            })
            .sum()
    }

    /// Connected-component label per vertex and the number of components.
    /// Labels are assigned in order of each component's smallest vertex.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(a) = queue.pop_front() {
                for (_, b) in self.neighbors(a) {
                    if label[b] == usize::MAX {
                        label[b] = count;
                        queue.push_back(b);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().1 == 1
    }

    /// Drops self-loops and keeps one representative (the lowest id) of every
    /// group of parallel edges. Returns the simple graph and, per simple edge,
    /// the original id of its representative.
    pub fn collapse_to_simple(&self) -> (WeightedMultiGraph, Vec<usize>) {
        let mut keyed: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_loop())
            .map(|(id, e)| (e.u.min(e.v), e.u.max(e.v), id))
            .collect();
        keyed.sort_unstable();
        keyed.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);
        keyed.sort_unstable_by_key(|t| t.2);
        let map: Vec<usize> = keyed.iter().map(|t| t.2).collect();
        let edges = map.iter().map(|&id| self.edges[id]).collect();
        (WeightedMultiGraph::from_valid_edges(self.n, edges), map)
    }
}

/// `y = L_G x`. Self-loops contribute nothing.
pub fn laplacian_matvec(g: &WeightedMultiGraph, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != g.n() {
        return Err(invalid(format!(
            "vector length {} does not match n = {}",
            x.len(),
            g.n()
        )));
    }
    let mut y = vec![0.0; g.n()];
    g.laplacian_apply(x, &mut y);
    Ok(y)
}

/// A tree stored as a list of vertices with parent links, in BFS order.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    pub root: usize,
    pub vertices: Vec<usize>,
    /// `(parent vertex, edge id)` aligned with `vertices`; `None` for the root.
    pub parent: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
}

impl RootedTree {
    pub fn singleton(v: usize) -> Self {
        RootedTree {
            root: v,
            vertices: vec![v],
            parent: vec![None],
            depth: vec![0],
        }
    }

    /// Maximum hop distance from the root.
    pub fn radius(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent.iter().filter_map(|p| p.map(|(_, e)| e))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootedForest {
    pub trees: Vec<RootedTree>,
}

impl RootedForest {
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.trees.iter().map(|t| t.root)
    }

    pub fn radii(&self) -> Vec<usize> {
        self.trees.iter().map(RootedTree::radius).collect()
    }

    /// Parent vertex per graph vertex (`None` for roots and for vertices not
    /// covered by the forest).
    pub fn parent_map(&self, n: usize) -> Vec<Option<usize>> {
        let mut p = vec![None; n];
        for t in &self.trees {
            for (i, &v) in t.vertices.iter().enumerate() {
                p[v] = t.parent[i].map(|(q, _)| q);
            }
        }
        p
    }
}

/// Incremental BFS with deterministic tie-breaking, restricted to vertices for
/// which `alive` holds. Scratch arrays are reused across balls via a stamp.
pub(crate) struct BallGrower {
    stamp: Vec<u32>,
    current: u32,
}

impl BallGrower {
    pub(crate) fn new(n: usize) -> Self {
        BallGrower {
            stamp: vec![0; n],
            current: 0,
        }
    }

    pub(crate) fn start(&mut self, center: usize) -> RootedTree {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
        self.stamp[center] = self.current;
        RootedTree::singleton(center)
    }

    /// Adds the next BFS layer to `tree`. Returns the number of new vertices.
    ///
    /// Each new vertex attaches to its smallest-id neighbour in the previous
    /// layer through the smallest edge id between them.
    pub(crate) fn grow_layer(
        &mut self,
        g: &WeightedMultiGraph,
        tree: &mut RootedTree,
        alive: impl Fn(usize) -> bool,
    ) -> usize {
        let depth = tree.radius();
        let start = tree
            .depth
            .iter()
            .position(|&d| d == depth)
            .unwrap_or(tree.vertices.len());
        let before = tree.vertices.len();
        let mut layer: Vec<(usize, usize, usize)> = Vec::new();
        for i in start..before {
            let a = tree.vertices[i];
            for (id, b) in g.neighbors(a) {
                if self.stamp[b] != self.current && alive(b) {
                    self.stamp[b] = self.current;
                    layer.push((b, a, id));
                }
            }
        }
        layer.sort_unstable_by_key(|t| t.0);
        for (b, a, id) in layer {
            tree.vertices.push(b);
            tree.parent.push(Some((a, id)));
            tree.depth.push(depth + 1);
        }
        tree.vertices.len() - before
    }
}

/// Hop-distance ball `B(v, R)` and its BFS tree.
///
/// The previous layer is scanned in ascending vertex order and incident edges
/// in ascending id order, so every vertex is claimed by its smallest-id parent
/// through the smallest edge id. The returned vertex set is sorted.
pub fn ball_and_tree(
    g: &WeightedMultiGraph,
    v: usize,
    radius: usize,
) -> Result<(Vec<usize>, RootedTree)> {
    if v >= g.n() {
        return Err(invalid(format!("center {v} outside [0,{})", g.n())));
    }
    let mut grower = BallGrower::new(g.n());
    let mut tree = grower.start(v);
    for _ in 0..radius {
        if grower.grow_layer(g, &mut tree, |_| true) == 0 {
            break;
        }
    }
    let mut ball = tree.vertices.clone();
    ball.sort_unstable();
    Ok((ball, tree))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMap {
    pub vertex_to_supernode: Vec<usize>,
    /// Quotient edge id for each original edge. Quotients keep every edge, so
    /// this is the identity; it is stored so callers never rely on that.
    pub edge_to_quotient_edge: Vec<usize>,
}

/// Contracts every group to one supernode. `groups[v]` is the group label of
/// vertex `v`; labels must cover `0..num_groups` without gaps.
pub fn quotient(
    g: &WeightedMultiGraph,
    groups: &[usize],
    num_groups: usize,
) -> Result<(WeightedMultiGraph, QuotientMap)> {
    if groups.len() != g.n() {
        return Err(invalid("group labels must cover every vertex"));
    }
    let mut seen = vec![false; num_groups];
    for &c in groups {
        if c >= num_groups {
            return Err(invalid(format!("group label {c} outside [0,{num_groups})")));
        }
        seen[c] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(invalid(
            "group labels do not form a partition (empty group)",
        ));
    }
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge {
            u: groups[e.u],
            v: groups[e.v],
            w: e.w,
        })
        .collect();
    let q = WeightedMultiGraph::from_valid_edges(num_groups, edges);
    let map = QuotientMap {
        vertex_to_supernode: groups.to_vec(),
        edge_to_quotient_edge: (0..g.m()).collect(),
    };
    Ok((q, map))
}

/// Quotient by a list of vertex groups rather than a label vector.
pub fn quotient_by_groups(
    g: &WeightedMultiGraph,
    groups: &[Vec<usize>],
) -> Result<(WeightedMultiGraph, QuotientMap)> {
    let mut label = vec![usize::MAX; g.n()];
    for (c, grp) in groups.iter().enumerate() {
        for &v in grp {
            if v >= g.n() {
                return Err(invalid(format!("vertex {v} outside [0,{})", g.n())));
            }
            if label[v] != usize::MAX {
                return Err(invalid(format!("vertex {v} appears in two groups")));
            }
            label[v] = c;
        }
    }
    if label.contains(&usize::MAX) {
        return Err(invalid("groups do not cover every vertex"));
    }
    quotient(g, &label, groups.len())
}

/// Translation tables from a derived graph back to its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphMap {
    pub vertex_to_parent: Vec<usize>,
    pub edge_to_parent: Vec<usize>,
}

/// `G[S]`: vertices of `set` renumbered in the given order, keeping every edge
/// with both endpoints in `set`.
pub fn induced_subgraph(
    g: &WeightedMultiGraph,
    set: &[usize],
) -> Result<(WeightedMultiGraph, SubgraphMap)> {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in set.iter().enumerate() {
        if v >= g.n() {
            return Err(invalid(format!("vertex {v} outside [0,{})", g.n())));
        }
        if local[v] != usize::MAX {
            return Err(invalid(format!("vertex {v} listed twice")));
        }
        local[v] = i;
    }
    let mut edges = Vec::new();
    let mut edge_to_parent = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if local[e.u] != usize::MAX && local[e.v] != usize::MAX {
            edges.push(Edge {
                u: local[e.u],
                v: local[e.v],
                w: e.w,
            });
            edge_to_parent.push(id);
        }
    }
    Ok((
        WeightedMultiGraph::from_valid_edges(set.len(), edges),
        SubgraphMap {
            vertex_to_parent: set.to_vec(),
            edge_to_parent,
        },
    ))
}

/// Spanning subgraph on all `n` vertices keeping only the listed edge ids, in
/// the given order.
pub fn edge_subgraph(
    g: &WeightedMultiGraph,
    ids: &[usize],
) -> Result<(WeightedMultiGraph, SubgraphMap)> {
    let mut used = vec![false; g.m()];
    let mut edges = Vec::with_capacity(ids.len());
    for &id in ids {
        if id >= g.m() {
            return Err(invalid(format!("edge id {id} outside [0,{})", g.m())));
        }
        if used[id] {
            return Err(invalid(format!("edge id {id} listed twice")));
        }
        used[id] = true;
        edges.push(g.edge(id));
    }
    Ok((
        WeightedMultiGraph::from_valid_edges(g.n(), edges),
        SubgraphMap {
            vertex_to_parent: (0..g.n()).collect(),
            edge_to_parent: ids.to_vec(),
        },
    ))
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }

    /// Dense labels `0..set_count` ordered by each set's smallest element.
    pub fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut root_label = vec![usize::MAX; n];
        let mut next = 0;
        let label = (0..n)
            .map(|v| {
                let r = self.find(v);
                if root_label[r] == usize::MAX {
                    root_label[r] = next;
                    next += 1;
                }
                root_label[r]
            })
            .collect();
        (label, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn brute_bfs(g: &WeightedMultiGraph, s: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; g.n()];
        d[s] = 0;
        let mut changed = true;
        while changed {
            changed = false;
            for e in g.edges() {
                for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                    if d[a] != usize::MAX && d[a] + 1 < d[b] {
                        d[b] = d[a] + 1;
                        changed = true;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(build_graph(2, [(0, 1, 0.0)]).is_err());
        assert!(build_graph(2, [(0, 1, -1.0)]).is_err());
        assert!(build_graph(2, [(0, 1, f64::NAN)]).is_err());
        assert!(build_graph(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn degrees_and_volume() {
        let g = build_graph(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (1.0, 1.0));
        let l = build_graph(1, [(0, 0, 2.0)]).unwrap();
        assert_eq!(l.degree(0), 2.0);
        assert_eq!(l.incident(0).len(), 2);
        let t = generators::complete(3);
        assert_eq!(t.total_volume(), 6.0);
    }

    #[test]
    fn edge_order_is_preserved() {
        let g = build_graph(3, [(2, 1, 1.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(g.edge(0), Edge { u: 2, v: 1, w: 1.0 });
        assert_eq!(g.edge(1).w, 3.0);
        assert_eq!(g.incident(2), &[0, 1]);
    }

    #[test]
    fn balls_on_paths() {
        let p4 = generators::path(4);
        let (ball, tree) = ball_and_tree(&p4, 0, 1).unwrap();
        assert_eq!(ball, vec![0, 1]);
        assert_eq!(tree.edge_ids().collect::<Vec<_>>(), vec![0]);
        let (ball, _) = ball_and_tree(&p4, 1, 10).unwrap();
        assert_eq!(ball, vec![0, 1, 2, 3]);
    }

    #[test]
    fn grid_corner_ball_has_six_vertices() {
        let g = generators::grid(4, 4);
        let (ball, tree) = ball_and_tree(&g, 0, 2).unwrap();
        assert_eq!(ball.len(), 6);
        assert_eq!(tree.radius(), 2);
    }

    #[test]
    fn bfs_ties_prefer_small_parent_then_small_edge() {
        // vertex 3 is reachable from both 1 and 2; two parallel edges 1-3.
        let g = build_graph(
            4,
            [
                (0, 2, 1.0),
                (0, 1, 1.0),
                (2, 3, 1.0),
                (1, 3, 1.0),
                (1, 3, 1.0),
            ],
        )
        .unwrap();
        let (_, tree) = ball_and_tree(&g, 0, 2).unwrap();
        let i = tree.vertices.iter().position(|&v| v == 3).unwrap();
        assert_eq!(tree.parent[i], Some((1, 3)));
    }

    #[test]
    fn ball_radius_matches_brute_force() {
        let mut rng = crate::rng::seeded(5);
        for trial in 0..20 {
            let g = generators::random_connected(40 + trial, 60 + 3 * trial, &mut rng);
            for r in 0..5 {
                let (ball, tree) = ball_and_tree(&g, trial % g.n(), r).unwrap();
                let d = brute_bfs(&g, trial % g.n());
                let expect: Vec<usize> = (0..g.n()).filter(|&v| d[v] <= r).collect();
                assert_eq!(ball, expect);
                for (i, &v) in tree.vertices.iter().enumerate() {
                    assert_eq!(tree.depth[i], d[v]);
                }
            }
        }
    }

    #[test]
    fn quotient_triangle_and_rows() {
        let t = generators::complete(3);
        let (q, map) = quotient(&t, &[0, 0, 1], 2).unwrap();
        assert_eq!(q.n(), 2);
        assert_eq!(q.edges().iter().filter(|e| e.is_loop()).count(), 1);
        assert_eq!(q.edges().iter().filter(|e| !e.is_loop()).count(), 2);
        assert_eq!(map.edge_to_quotient_edge, vec![0, 1, 2]);

        let g = generators::grid(4, 4);
        let rows: Vec<usize> = (0..16).map(|v| v / 4).collect();
        let (q, _) = quotient(&g, &rows, 4).unwrap();
        assert_eq!(q.edges().iter().filter(|e| e.is_loop()).count(), 12);
        assert_eq!(q.edges().iter().filter(|e| !e.is_loop()).count(), 12);
        assert!((q.total_weight() - g.total_weight()).abs() < 1e-12);
        assert!(quotient(&g, &rows, 5).is_err());
    }

    #[test]
    fn quotient_restricts_quadratic_form() {
        let mut rng = crate::rng::seeded(9);
        let g = generators::random_weighted(30, 90, 1.0, 10.0, &mut rng);
        let labels: Vec<usize> = (0..30).map(|v| v % 7).collect();
        let (q, _) = quotient(&g, &labels, 7).unwrap();
        let y: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
        let lifted: Vec<f64> = labels.iter().map(|&c| y[c]).collect();
        assert!((q.quadratic_form(&y) - g.quadratic_form(&lifted)).abs() < 1e-9);
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = generators::complete(4);
        let (t, map) = induced_subgraph(&k4, &[0, 1, 2]).unwrap();
        assert_eq!((t.n(), t.m()), (3, 3));
        assert_eq!(map.edge_to_parent.len(), 3);
        let (e, _) = edge_subgraph(&k4, &[]).unwrap();
        assert_eq!((e.n(), e.m()), (4, 0));
        let pet = generators::petersen();
        let (c5, _) = induced_subgraph(&pet, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(c5.m(), 5);
        assert!((0..5).all(|v| c5.edge_degree(v) == 2));
        assert!(c5.is_connected());
    }

    #[test]
    fn laplacian_examples() {
        let g = build_graph(3, [(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0)]).unwrap();
        assert_eq!(
            laplacian_matvec(&g, &[1.0, 0.0, 0.0]).unwrap(),
            vec![3.0, -1.0, -2.0]
        );
        assert!(laplacian_matvec(&g, &[1.0; 3])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let e = generators::path(2);
        assert_eq!(laplacian_matvec(&e, &[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        let l = build_graph(2, [(0, 0, 5.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian_matvec(&l, &[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        assert!(laplacian_matvec(&g, &[1.0]).is_err());
    }

    #[test]
    fn volume_complement_identity() {
        let mut rng = crate::rng::seeded(1);
        let g = generators::random_connected(25, 60, &mut rng);
        let s: Vec<usize> = (0..25).filter(|v| v % 3 == 0).collect();
        let rest: Vec<usize> = (0..25).filter(|v| v % 3 != 0).collect();
        assert!((g.volume(&s) + g.volume(&rest) - g.total_volume()).abs() < 1e-12);
    }

    #[test]
    fn collapse_keeps_lowest_parallel_edge() {
        let g = build_graph(3, [(1, 0, 1.0), (0, 0, 1.0), (0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let (s, map) = g.collapse_to_simple();
        assert_eq!(map, vec![0, 3]);
        assert_eq!(s.m(), 2);
    }

    #[test]
    fn union_find_labels() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(3, 4));
        assert!(uf.union(1, 3));
        assert!(!uf.union(4, 1));
        assert_eq!(uf.labels(), (vec![0, 1, 2, 1, 1], 3));
    }
}
