//! Partial Cholesky elimination of degree-one and degree-two vertices.
//!
//! Removing a leaf moves its demand onto its neighbour; removing a vertex of
//! degree two replaces its two edges by one series edge and splits its
//! demand between the two neighbours in proportion to the edge weights. Both
//! steps are exact, so the potentials of eliminated vertices are recovered
//! from the core solution by substitution in reverse order.

use alloc::vec;
use alloc::vec::Vec;

use super::InnerSolver;
use crate::error::{invalid, Result};
use crate::graph::{Edge, WeightedMultiGraph};
use crate::oracle::project_components;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    /// A vertex whose whole component has been eliminated.
    Isolated { v: usize },
    Leaf {
        v: usize,
        u: usize,
        w: f64,
        demand: f64,
    },
    Series {
        v: usize,
        a: usize,
        wa: f64,
        b: usize,
        wb: f64,
        demand: f64,
    },
}

/// The reduced system left after elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// Laplacian of the remaining vertices, renumbered in increasing order.
    pub core: WeightedMultiGraph,
    /// Original vertex of each core vertex.
    pub core_vertices: Vec<usize>,
    /// Right-hand side of the core system.
    pub core_rhs: Vec<f64>,
    steps: Vec<Step>,
    n: usize,
}

impl Elimination {
    pub fn eliminated(&self) -> usize {
        self.steps.len()
    }

    /// Potentials of every vertex from a solution of the core system.
    pub fn back_substitute(&self, core_x: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &v) in self.core_vertices.iter().enumerate() {
            x[v] = core_x[i];
        }
        for step in self.steps.iter().rev() {
            match *step {
                Step::Isolated { v } => x[v] = 0.0,
                Step::Leaf { v, u, w, demand } => x[v] = x[u] + demand / w,
                Step::Series {
                    v,
                    a,
                    wa,
                    b,
                    wb,
                    demand,
                } => x[v] = (wa * x[a] + wb * x[b] + demand) / (wa + wb),
            }
        }
        x
    }
}

type Adjacency = Vec<Vec<(usize, f64)>>;

/// Neighbour lists with parallel edges summed and loops dropped.
fn merged_adjacency(g: &WeightedMultiGraph) -> Adjacency {
    let mut adj: Adjacency = vec![Vec::new(); g.n()];
    for e in g.edges() {
        if !e.is_loop() {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
    }
    for list in &mut adj {
        list.sort_unstable_by_key(|&(u, _)| u);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(list.len());
        for &(u, w) in list.iter() {
            match out.last_mut() {
                Some(last) if last.0 == u => last.1 += w,
                _ => out.push((u, w)),
            }
        }
        *list = out;
    }
    adj
}

fn remove(list: &mut Vec<(usize, f64)>, v: usize) {
    if let Some(i) = list.iter().position(|&(u, _)| u == v) {
        list.swap_remove(i);
    }
}

fn add(list: &mut Vec<(usize, f64)>, v: usize, w: f64) {
    match list.iter_mut().find(|(u, _)| *u == v) {
        Some(slot) => slot.1 += w,
        None => list.push((v, w)),
    }
}

/// Eliminates vertices of degree at most two (counting distinct neighbours,
/// parallel edges merged, loops ignored) until none remain.
pub fn eliminate(g: &WeightedMultiGraph, b: &[f64]) -> Result<Elimination> {
    let n = g.n();
    if b.len() != n {
        return Err(invalid("right-hand side length does not match n"));
    }
    let mut adj = merged_adjacency(g);
    let mut demand = b.to_vec();
    let mut gone = vec![false; n];
    let mut queued = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();
    for v in (0..n).rev() {
        if adj[v].len() <= 2 {
            queue.push(v);
            queued[v] = true;
        }
    }
    let mut steps = Vec::new();
    while let Some(v) = queue.pop() {
        queued[v] = false;
        if gone[v] || adj[v].len() > 2 {
            continue;
        }
        let nbrs: Vec<(usize, f64)> = adj[v].clone();
        match nbrs.as_slice() {
            [] => steps.push(Step::Isolated { v }),
            &[(u, w)] => {
                remove(&mut adj[u], v);
                demand[u] += demand[v];
                steps.push(Step::Leaf {
                    v,
                    u,
                    w,
                    demand: demand[v],
                });
            }
            &[(a, wa), (bb, wb)] => {
                remove(&mut adj[a], v);
                remove(&mut adj[bb], v);
                let ws = wa * wb / (wa + wb);
                add(&mut adj[a], bb, ws);
                add(&mut adj[bb], a, ws);
                demand[a] += demand[v] * wa / (wa + wb);
                demand[bb] += demand[v] * wb / (wa + wb);
                steps.push(Step::Series {
                    v,
                    a,
                    wa,
                    b: bb,
                    wb,
                    demand: demand[v],
                });
            }
            _ => unreachable!(),
        }
        adj[v].clear();
        gone[v] = true;
        for &(u, _) in &nbrs {
            if !gone[u] && !queued[u] && adj[u].len() <= 2 {
                queue.push(u);
                queued[u] = true;
            }
        }
    }
    let core_vertices: Vec<usize> = (0..n).filter(|&v| !gone[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in core_vertices.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for &v in &core_vertices {
        for &(u, w) in &adj[v] {
            if v < u {
                edges.push(Edge {
                    u: local[v],
                    v: local[u],
                    w,
                });
            }
        }
    }
    let core_rhs = core_vertices.iter().map(|&v| demand[v]).collect();
    Ok(Elimination {
        core: WeightedMultiGraph::from_valid_edges(core_vertices.len(), edges),
        core_vertices,
        core_rhs,
        steps,
        n,
    })
}

/// Eliminates, hands the core to `inner` (skipped when the core is empty)
/// and substitutes back. The answer has zero mean on each component of `g`.
pub fn eliminate_and_solve(
    g: &WeightedMultiGraph,
    b: &[f64],
    inner: &mut InnerSolver<'_>,
) -> Result<Vec<f64>> {
    let (labels, count) = g.components();
    let mut rhs = b.to_vec();
    if rhs.len() != g.n() {
        return Err(invalid("right-hand side length does not match n"));
    }
    project_components(&labels, count, &mut rhs);
    let elim = eliminate(g, &rhs)?;
    let core_x = if elim.core.n() == 0 {
        Vec::new()
    } else {
        inner(&elim.core, &elim.core_rhs)?
    };
    if core_x.len() != elim.core.n() {
        return Err(invalid(
            "inner solver returned a vector of the wrong length",
        ));
    }
    let mut x = elim.back_substitute(&core_x);
    project_components(&labels, count, &mut x);
    Ok(x)
}
