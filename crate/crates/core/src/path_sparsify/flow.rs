//! Unit-capacity max flow (Dinic) on the split digraph of an undirected graph.
//!
//! Every vertex `a` becomes `a_in → a_out` with capacity one, so integral
//! flows correspond to internally vertex-disjoint paths.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WeightedMultiGraph;

struct Arc {
    to: usize,
    cap: u32,
}

pub(crate) struct Dinic {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    pub(crate) fn new(nodes: usize) -> Self {
        Dinic {
            arcs: Vec::new(),
            head: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            it: vec![0; nodes],
        }
    }

    pub(crate) fn add_arc(&mut self, a: usize, b: usize, cap: u32) {
        self.head[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap });
        self.head[b].push(self.arcs.len());
        self.arcs.push(Arc { to: a, cap: 0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(a) = q.pop_front() {
            for &id in &self.head[a] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[a] + 1;
                    q.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, a: usize, t: usize, pushed: u32) -> u32 {
        if a == t {
            return pushed;
        }
        while self.it[a] < self.head[a].len() {
            let id = self.head[a][self.it[a]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            if cap > 0 && self.level[to] == self.level[a] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0 {
                    self.arcs[id].cap -= got;
                    self.arcs[id ^ 1].cap += got;
                    return got;
                }
            }
            self.it[a] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, limit - flow);
                if f == 0 {
                    break;
                }
                flow += f;
                if flow >= limit {
                    break;
                }
            }
        }
        flow
    }
}

/// Maximum number of internally vertex-disjoint `s`–`t` paths, of any length.
/// Parallel edges and self-loops do not add paths.
pub fn vertex_disjoint_count(g: &WeightedMultiGraph, s: usize, t: usize) -> usize {
    assert!(s != t, "vertex_disjoint_count needs distinct endpoints");
    let (simple, _) = g.collapse_to_simple();
    let n = simple.n();
    let big = u32::MAX / 4;
    let mut d = Dinic::new(2 * n);
    for a in 0..n {
        let cap = if a == s || a == t { big } else { 1 };
        d.add_arc(2 * a, 2 * a + 1, cap);
    }
    for e in simple.edges() {
        d.add_arc(2 * e.u + 1, 2 * e.v, 1);
        d.add_arc(2 * e.v + 1, 2 * e.u, 1);
    }
    d.max_flow(2 * s + 1, 2 * t, big) as usize
}
