use alloc::vec;
use alloc::vec::Vec;

use super::eliminate::eliminate_and_solve;
use super::sample::sample_preconditioner;
use super::InnerSolver;
use crate::error::{invalid, Result};
use crate::graph::WeightedMultiGraph;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RichardsonParams {
    pub iters_coeff: f64,
    pub step: f64,
    pub sample_delta: f64,
    pub size_check_coeff: f64,
    /// Exponent of the `‖τ‖_p^p` used by the size check.
    pub p: f64,
}

impl RichardsonParams {
    pub fn iterations(&self, eps: f64) -> usize {
        if eps >= 1.0 {
            0
        } else {
            libm::ceil(self.iters_coeff * libm::log(1.0 / eps)) as usize
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RichardsonStats {
    pub iterations: usize,
    /// Samples rejected by the size check.
    pub skipped: usize,
    /// Sum over accepted samples of their edge counts.
    pub sampled_edges: usize,
    pub max_sampled_edges: usize,
    pub draws: usize,
}

/// Preconditioned Richardson iteration for `L_system x = b`. Each step draws
/// a fresh sparsifier of `system` on top of `base` (using the leverage
/// overestimates `tau` taken through `base`), solves it by elimination plus
/// `inner`, and moves `x` by `step` times that correction.
#[allow(clippy::too_many_arguments)]
pub fn precon_richardson(
    system: &WeightedMultiGraph,
    base: &WeightedMultiGraph,
    tau: &[f64],
    b: &[f64],
    eps: f64,
    params: &RichardsonParams,
    inner: &mut InnerSolver<'_>,
    rng: &mut Rng,
) -> Result<(Vec<f64>, RichardsonStats)> {
    precon_richardson_observed(
        system,
        base,
        tau,
        b,
        eps,
        params,
        inner,
        rng,
        &mut |_, _| {},
    )
}

/// As [`precon_richardson`], calling `observe(t, x_t)` after every iteration
/// (skipped ones included).
#[allow(clippy::too_many_arguments)]
pub fn precon_richardson_observed(
    system: &WeightedMultiGraph,
    base: &WeightedMultiGraph,
    tau: &[f64],
    b: &[f64],
    eps: f64,
    params: &RichardsonParams,
    inner: &mut InnerSolver<'_>,
    rng: &mut Rng,
    observe: &mut dyn FnMut(usize, &[f64]),
) -> Result<(Vec<f64>, RichardsonStats)> {
    let n = system.n();
    if b.len() != n {
        return Err(invalid("right-hand side length does not match n"));
    }
    let norm_p: f64 = tau
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| libm::pow(t, params.p))
        .sum();
    let limit = params.size_check_coeff * norm_p + system.m() as f64;
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut stats = RichardsonStats::default();
    for _ in 0..params.iterations(eps) {
        stats.iterations += 1;
        let z = sample_preconditioner(system, base, tau, params.sample_delta, rng)?;
        stats.draws += z.draws;
        let size = z.graph.m();
        if size as f64 > limit {
            stats.skipped += 1;
            observe(stats.iterations, &x);
            continue;
        }
        stats.sampled_edges += size;
        stats.max_sampled_edges = stats.max_sampled_edges.max(size);
        system.laplacian_apply(&x, &mut r);
        for i in 0..n {
            r[i] -= b[i];
        }
        let y = eliminate_and_solve(&z.graph, &r, inner)?;
        for i in 0..n {
            x[i] -= params.step * y[i];
        }
        observe(stats.iterations, &x);
    }
    Ok((x, stats))
}
