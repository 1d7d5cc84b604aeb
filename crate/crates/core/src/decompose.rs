//! Bucketed ball-growing decomposition.
//!
//! Balls are grown in hop distance from the lowest-id surviving vertex until,
//! for every edge bucket, the ball's boundary is small compared to its
//! volume. The ball becomes a piece; its BFS tree is then cut back so every
//! remaining subtree has hop radius at most `r`.
//!
//! All volumes are measured in the graph that remains when the ball is grown,
//! with every edge counted as weight 1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::graph::{BallGrower, RootedForest, RootedTree, WeightedMultiGraph};

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub pieces: Vec<Vec<usize>>,
    /// Trees of each piece; their vertex sets partition the piece.
    pub trees: Vec<RootedForest>,
    /// Final ball radius `R_t` of each piece.
    pub ball_radius: Vec<usize>,
}

impl Decomposition {
    pub fn tree_count(&self) -> usize {
        self.trees.iter().map(|f| f.trees.len()).sum()
    }

    /// Piece index of every vertex.
    pub fn piece_of(&self, n: usize) -> Vec<usize> {
        let mut p = vec![usize::MAX; n];
        for (i, piece) in self.pieces.iter().enumerate() {
            for &v in piece {
                p[v] = i;
            }
        }
        p
    }
}

/// Measured quantities and the corresponding bounds for one decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionBounds {
    pub cut_per_bucket: Vec<usize>,
    pub cut_bound_per_bucket: Vec<f64>,
    pub max_tree_radius: usize,
    pub tree_count: usize,
    pub tree_count_bound: f64,
}

impl DecompositionBounds {
    pub fn violations(&self, r: usize) -> usize {
        let cut = self
            .cut_per_bucket
            .iter()
            .zip(&self.cut_bound_per_bucket)
            .filter(|(c, b)| **c as f64 > **b + 1e-9)
            .count();
        cut + usize::from(self.max_tree_radius > r)
            + usize::from(self.tree_count as f64 > self.tree_count_bound + 1e-9)
    }
}

/// Recomputes the three guarantees from scratch for `d`.
pub fn check_bounds(
    g: &WeightedMultiGraph,
    buckets: &[usize],
    num_buckets: usize,
    beta: f64,
    r: usize,
    d: &Decomposition,
) -> DecompositionBounds {
    let piece = d.piece_of(g.n());
    let mut size = vec![0usize; num_buckets];
    let mut cut = vec![0usize; num_buckets];
    for (id, e) in g.edges().iter().enumerate() {
        size[buckets[id]] += 1;
        if piece[e.u] != piece[e.v] {
            cut[buckets[id]] += 1;
        }
    }
    let m = g.m() as f64;
    let decay = libm::exp(-(r as f64) * beta / num_buckets.max(1) as f64);
    DecompositionBounds {
        cut_bound_per_bucket: size
            .iter()
            .map(|&s| 6.0 * beta * s as f64 + 6.0 * beta * m * decay)
            .collect(),
        cut_per_bucket: cut,
        max_tree_radius: d
            .trees
            .iter()
            .flat_map(|f| f.trees.iter().map(RootedTree::radius))
            .max()
            .unwrap_or(0),
        tree_count: d.tree_count(),
        tree_count_bound: d.pieces.len() as f64 + 4.0 * m * decay,
    }
}

/// Runs the decomposition. `buckets[e]` is the bucket (in `0..num_buckets`)
/// of edge `e`; every edge is treated as unit weight.
pub fn decompose(
    g: &WeightedMultiGraph,
    buckets: &[usize],
    num_buckets: usize,
    beta: f64,
    r: usize,
) -> Result<Decomposition> {
    if !(beta > 0.0 && beta <= 1.0 / 6.0) {
        return Err(invalid(format!("beta = {beta} outside (0, 1/6]")));
    }
    if buckets.len() != g.m() {
        return Err(invalid("bucket assignment must cover every edge"));
    }
    if let Some(&b) = buckets.iter().find(|&&b| b >= num_buckets) {
        return Err(invalid(format!(
            "bucket index {b} outside [0,{num_buckets})"
        )));
    }
    let n = g.n();
    let nb = num_buckets;
    let decay = libm::exp(-(r as f64) * beta / nb.max(1) as f64);

    let mut alive = vec![true; n];
    let mut deg = vec![0usize; n];
    let mut bdeg = vec![0usize; n * nb];
    let mut surviving = vec![0usize; nb];
    for (id, e) in g.edges().iter().enumerate() {
        let b = buckets[id];
        surviving[b] += 1;
        deg[e.u] += 1;
        bdeg[e.u * nb + b] += 1;
        if !e.is_loop() {
            deg[e.v] += 1;
            bdeg[e.v * nb + b] += 1;
        }
    }

    let mut in_ball = vec![false; n];
    let mut grower = BallGrower::new(n);
    let mut out = Decomposition {
        pieces: Vec::new(),
        trees: Vec::new(),
        ball_radius: Vec::new(),
    };
    let mut next_start = 0;

    loop {
        while next_start < n && !alive[next_start] {
            next_start += 1;
        }
        if next_start == n {
            break;
        }
        let center = next_start;
        let mut tree = grower.start(center);
        in_ball[center] = true;

        let mut vol = 0usize;
        let mut bvol = vec![0usize; nb];
        let mut bnd = 0usize;
        let mut bbnd = vec![0usize; nb];
        let absorb = |x: usize,
                      in_ball: &[bool],
                      vol: &mut usize,
                      bvol: &mut [usize],
                      bnd: &mut usize,
                      bbnd: &mut [usize]| {
            *vol += deg[x];
            for j in 0..nb {
                bvol[j] += bdeg[x * nb + j];
            }
            for &id in g.incident(x) {
                let e = g.edge(id);
                if e.is_loop() {
                    continue;
                }
                let y = e.other(x);
                if !alive[y] {
                    continue;
                }
                let j = buckets[id];
                if in_ball[y] && y != x {
                    *bnd -= 1;
                    bbnd[j] -= 1;
                } else {
                    *bnd += 1;
                    bbnd[j] += 1;
                }
            }
        };
        absorb(center, &in_ball, &mut vol, &mut bvol, &mut bnd, &mut bbnd);

        let mut radius = 0usize;
        loop {
            let expand = bnd > 0
                && (0..nb).any(|j| {
                    surviving[j] > 0
                        && decay * bnd as f64 + bbnd[j] as f64
                            >= 3.0 * beta * (decay * vol as f64 + bvol[j] as f64)
                });
            if !expand {
                break;
            }
            let before = tree.vertices.len();
            let prev_vol = vol;
            let prev_bnd = bnd;
            grower.grow_layer(g, &mut tree, |v| alive[v]);
            radius += 1;
            for i in before..tree.vertices.len() {
                let x = tree.vertices[i];
                in_ball[x] = true;
                absorb(x, &in_ball, &mut vol, &mut bvol, &mut bnd, &mut bbnd);
            }
            debug_assert!(
                vol >= prev_vol + prev_bnd,
                "ball volume must grow by at least the boundary"
            );
        }

        out.trees.push(retract(&tree, radius, r));
        out.ball_radius.push(radius);
        let mut piece = tree.vertices.clone();
        piece.sort_unstable();

        for &x in &piece {
            alive[x] = false;
        }
        for &x in &piece {
            let inc = g.incident(x);
            for (k, &id) in inc.iter().enumerate() {
                let e = g.edge(id);
                let j = buckets[id];
                if e.is_loop() {
                    // a loop is listed twice in a row; count it once
                    if k == 0 || inc[k - 1] != id {
                        surviving[j] -= 1;
                    }
                    continue;
                }
                let y = e.other(x);
                if alive[y] {
                    deg[y] -= 1;
                    bdeg[y * nb + j] -= 1;
                    surviving[j] -= 1;
                } else if in_ball[y] && x < y {
                    surviving[j] -= 1;
                }
            }
        }
        for &x in &piece {
            in_ball[x] = false;
        }
        out.pieces.push(piece);
    }

    #[cfg(debug_assertions)]
    {
        let report = check_bounds(g, buckets, nb, beta, r, &out);
        debug_assert_eq!(
            report.violations(r),
            0,
            "decomposition guarantees violated: {report:?}"
        );
    }
    Ok(out)
}

/// Cuts the BFS tree of a radius-`big_r` ball so every subtree has radius at
/// most `r`: edges whose deeper endpoint sits at depth `≤ big_r − r` go.
fn retract(tree: &RootedTree, big_r: usize, r: usize) -> RootedForest {
    if big_r < r {
        return RootedForest {
            trees: vec![tree.clone()],
        };
    }
    let cut_depth = big_r - r;
    let mut forest: Vec<RootedTree> = Vec::new();
    let mut owner: Vec<(usize, usize)> = Vec::with_capacity(tree.vertices.len());
    let mut index_of = alloc::collections::BTreeMap::new();
    for (i, &v) in tree.vertices.iter().enumerate() {
        index_of.insert(v, i);
        let d = tree.depth[i];
        if d <= cut_depth {
            owner.push((forest.len(), d));
            forest.push(RootedTree::singleton(v));
        } else {
            let (p, id) = tree.parent[i].expect("non-root vertex has a parent");
            let (t, base) = owner[index_of[&p]];
            owner.push((t, base));
            forest[t].vertices.push(v);
            forest[t].parent.push(Some((p, id)));
            forest[t].depth.push(d - base);
        }
    }
    RootedForest { trees: forest }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::build_graph;
    use rand::Rng as _;

    /// Step-by-step simulation recomputing every ball, boundary and volume
    /// from scratch on the remaining graph.
    fn reference(
        g: &WeightedMultiGraph,
        buckets: &[usize],
        nb: usize,
        beta: f64,
        r: usize,
    ) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
        let n = g.n();
        let mut alive = vec![true; n];
        let mut pieces = Vec::new();
        let mut radii = Vec::new();
        let mut tree_counts = Vec::new();
        let decay = libm::exp(-(r as f64) * beta / nb as f64);
        while let Some(v) = (0..n).find(|&v| alive[v]) {
            let ball = |rad: usize| -> Vec<usize> {
                let mut dist = vec![usize::MAX; n];
                dist[v] = 0;
                for step in 0..rad {
                    for e in g.edges() {
                        if alive[e.u] && alive[e.v] {
                            if dist[e.u] == step && dist[e.v] == usize::MAX {
                                dist[e.v] = step + 1;
                            }
                            if dist[e.v] == step && dist[e.u] == usize::MAX {
                                dist[e.u] = step + 1;
                            }
                        }
                    }
                }
                (0..n).filter(|&x| dist[x] != usize::MAX).collect()
            };
            let stats = |set: &[usize]| {
                let mut inside = vec![false; n];
                set.iter().for_each(|&x| inside[x] = true);
                let (mut vol, mut bnd) = (0usize, 0usize);
                let (mut bvol, mut bbnd, mut surv) =
                    (vec![0usize; nb], vec![0usize; nb], vec![0usize; nb]);
                for (id, e) in g.edges().iter().enumerate() {
                    if !(alive[e.u] && alive[e.v]) {
                        continue;
                    }
                    let j = buckets[id];
                    surv[j] += 1;
                    let c = usize::from(inside[e.u]) + usize::from(inside[e.v] && !e.is_loop());
                    vol += c;
                    bvol[j] += c;
                    if inside[e.u] != inside[e.v] {
                        bnd += 1;
                        bbnd[j] += 1;
                    }
                }
                (vol, bvol, bnd, bbnd, surv)
            };
            let mut rad = 0;
            loop {
                let set = ball(rad);
                let (vol, bvol, bnd, bbnd, surv) = stats(&set);
                let grow = bnd > 0
                    && (0..nb).any(|j| {
                        surv[j] > 0
                            && decay * bnd as f64 + bbnd[j] as f64
                                >= 3.0 * beta * (decay * vol as f64 + bvol[j] as f64)
                    });
                if !grow {
                    break;
                }
                rad += 1;
            }
            let set = ball(rad);
            let near = if rad >= r { ball(rad - r).len() } else { 1 };
            set.iter().for_each(|&x| alive[x] = false);
            pieces.push(set);
            radii.push(rad);
            tree_counts.push(near);
        }
        (pieces, radii, tree_counts)
    }

    #[test]
    fn rejects_bad_beta() {
        let g = generators::path(3);
        assert!(decompose(&g, &[0, 0], 1, 0.0, 1).is_err());
        assert!(decompose(&g, &[0, 0], 1, 0.2, 1).is_err());
        assert!(decompose(&g, &[0, 0], 1, 1.0 / 6.0, 1).is_ok());
    }

    #[test]
    fn trivial_inputs() {
        let g = build_graph(3, []).unwrap();
        let d = decompose(&g, &[], 2, 0.1, 3).unwrap();
        assert_eq!(d.pieces, vec![vec![0], vec![1], vec![2]]);
        assert!(d
            .trees
            .iter()
            .all(|f| f.trees.len() == 1 && f.trees[0].radius() == 0));
        let one = build_graph(1, []).unwrap();
        let d = decompose(&one, &[], 1, 0.1, 0).unwrap();
        assert_eq!((d.pieces.len(), d.tree_count()), (1, 1));
    }

    #[test]
    fn path16_matches_reference_and_bounds() {
        let g = generators::path(16);
        let b = vec![0; 15];
        let d = decompose(&g, &b, 1, 1.0 / 6.0, 4).unwrap();
        let (pieces, radii, counts) = reference(&g, &b, 1, 1.0 / 6.0, 4);
        assert_eq!(d.pieces, pieces);
        assert_eq!(d.ball_radius, radii);
        assert_eq!(
            d.trees.iter().map(|f| f.trees.len()).collect::<Vec<_>>(),
            counts
        );
        assert_eq!(check_bounds(&g, &b, 1, 1.0 / 6.0, 4, &d).violations(4), 0);
    }

    #[test]
    fn random_instances_match_reference() {
        let mut rng = crate::rng::seeded(11);
        for trial in 0..40 {
            let n = 10 + trial;
            let g = generators::random_connected(n, n + 2 * trial, &mut rng);
            let nb = 1 + trial % 3;
            let b: Vec<usize> = (0..g.m()).map(|_| rng.gen_range(0..nb)).collect();
            let beta = [1.0 / 6.0, 0.1, 0.03][trial % 3];
            let r = trial % 5;
            let d = decompose(&g, &b, nb, beta, r).unwrap();
            let (pieces, radii, counts) = reference(&g, &b, nb, beta, r);
            assert_eq!(d.pieces, pieces, "trial {trial}");
            assert_eq!(d.ball_radius, radii);
            assert_eq!(
                d.trees.iter().map(|f| f.trees.len()).collect::<Vec<_>>(),
                counts
            );
            assert_eq!(check_bounds(&g, &b, nb, beta, r, &d).violations(r), 0);
        }
    }

    #[test]
    fn trees_partition_pieces_and_use_piece_edges() {
        let mut rng = crate::rng::seeded(2);
        let g = generators::random_regular(60, 4, &mut rng);
        let b = vec![0; g.m()];
        let d = decompose(&g, &b, 1, 0.05, 2).unwrap();
        let piece = d.piece_of(g.n());
        for (i, f) in d.trees.iter().enumerate() {
            let mut vs: Vec<usize> = f
                .trees
                .iter()
                .flat_map(|t| t.vertices.iter().copied())
                .collect();
            vs.sort_unstable();
            assert_eq!(vs, d.pieces[i]);
            for t in &f.trees {
                assert!(t.radius() <= 2);
                for id in t.edge_ids() {
                    let e = g.edge(id);
                    assert_eq!((piece[e.u], piece[e.v]), (i, i));
                }
            }
        }
    }

    #[test]
    fn self_loops_and_multi_edges() {
        let g = build_graph(
            4,
            [
                (0, 0, 1.0),
                (0, 1, 1.0),
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 3, 1.0),
            ],
        )
        .unwrap();
        let b = vec![0, 1, 0, 1, 0, 1];
        let d = decompose(&g, &b, 2, 1.0 / 6.0, 1).unwrap();
        let (pieces, _, _) = reference(&g, &b, 2, 1.0 / 6.0, 1);
        assert_eq!(d.pieces, pieces);
    }
}
