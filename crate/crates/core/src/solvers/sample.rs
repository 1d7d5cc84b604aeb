use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng as _, RngCore};

use crate::error::{invalid, Result};
use crate::graph::{Edge, WeightedMultiGraph};
use crate::rng::Rng;

/// Walker's alias method over nonnegative weights.
#[derive(Clone, Debug)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// `None` when every weight is zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        let mut prob: Vec<f64> = weights.iter().map(|&w| w * n as f64 / total).collect();
        let mut alias = vec![0u32; n];
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l as u32;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        Some(AliasTable { prob, alias })
    }

    /// One draw from a single 64-bit word: the high half picks the column,
    /// the low half decides between it and its alias.
    pub fn draw(&self, rng: &mut Rng) -> usize {
        let word = rng.next_u64();
        let i = (((word >> 32) * self.prob.len() as u64) >> 32) as usize;
        let coin = (word & 0xFFFF_FFFF) as f64 * (1.0 / 4_294_967_296.0);
        if coin < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampledPreconditioner {
    /// The base edges followed by one edge per distinct sampled edge.
    pub graph: WeightedMultiGraph,
    pub draws: usize,
    pub distinct: usize,
    /// `r δ / s`, the multiple of the system carried in expectation.
    pub theta: f64,
}

/// Starts from `base` and adds `r` draws from the edges of `system`, each
/// chosen with probability proportional to `tau` and adding `(δ/τ_e) w_e`.
/// `r` is uniform on the integers in `[t, 2t − 1]` with `t = Στ / δ`.
pub fn sample_preconditioner(
    system: &WeightedMultiGraph,
    base: &WeightedMultiGraph,
    tau: &[f64],
    delta: f64,
    rng: &mut Rng,
) -> Result<SampledPreconditioner> {
    if tau.len() != system.m() {
        return Err(invalid("one overestimate per system edge is required"));
    }
    if base.n() != system.n() {
        return Err(invalid("base and system must share the vertex set"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("sampling parameter must lie in (0,1)"));
    }
    let mut edges: Vec<Edge> = base.edges().to_vec();
    let Some(table) = AliasTable::new(tau) else {
        return Ok(SampledPreconditioner {
            graph: base.clone(),
            draws: 0,
            distinct: 0,
            theta: 0.0,
        });
    };
    let s: f64 = tau.iter().sum();
    let t = s / delta;
    let lo = (libm::ceil(t) as usize).max(1);
    let hi = (libm::floor(2.0 * t - 1.0) as usize).max(lo);
    let r = rng.gen_range(lo..=hi);
    let mut count = vec![0u32; system.m()];
    let mut touched = Vec::new();
    for _ in 0..r {
        let e = table.draw(rng);
        if count[e] == 0 {
            touched.push(e);
        }
        count[e] += 1;
    }
    touched.sort_unstable();
    for &e in &touched {
        let se = system.edge(e);
        edges.push(Edge {
            w: count[e] as f64 * delta / tau[e] * se.w,
            ..se
        });
    }
    Ok(SampledPreconditioner {
        graph: WeightedMultiGraph::from_valid_edges(system.n(), edges),
        draws: r,
        distinct: touched.len(),
        theta: r as f64 * delta / s,
    })
}
