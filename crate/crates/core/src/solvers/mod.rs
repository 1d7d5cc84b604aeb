//! The recursive Laplacian solver and its parts.
//!
//! A level builds a distortion subgraph `H` of its input `G`, scales it into
//! the preconditioner `G' = G + (η − 1)H` and runs accelerated gradient
//! descent on `G` with `G'` as the preconditioner. Systems in `G'` are solved
//! by Richardson iteration over randomly sampled sparsifiers of `G'`, whose
//! degree-one and degree-two vertices are eliminated before the remaining
//! core is handed to the next level.

pub mod agd;
pub mod cg;
pub mod eliminate;
pub mod richardson;
pub mod sample;

/// Solves a Laplacian system on a smaller graph, used for the recursive call.
pub type InnerSolver<'a> = dyn FnMut(&WeightedMultiGraph, &[f64]) -> Result<Vec<f64>> + 'a;

pub use agd::{precon_noisy_agd, precon_noisy_agd_observed, AgdSchedule, Observer};
pub use cg::{conjugate_gradient, CgReport};
pub use eliminate::{eliminate, eliminate_and_solve, Elimination};
pub use richardson::{
    precon_richardson, precon_richardson_observed, RichardsonParams, RichardsonStats,
};
pub use sample::{sample_preconditioner, AliasTable, SampledPreconditioner};

use alloc::vec;
use alloc::vec::Vec;

use crate::config::SolverConfig;
use crate::error::{invalid, Result};
use crate::graph::{Edge, WeightedMultiGraph};
use crate::oracle::project_components;
use crate::rng::{split_from, Rng, StreamSplitter};
use crate::spectral_subgraph::{default_path_sparsifier, spectral_subgraph, DistortionSubgraph};

/// `G' = G + (η − 1)H` with overestimates through `ηH`.
#[derive(Clone, Debug)]
pub struct PreconditionerGraph {
    /// Edges of `G` without loops; edges of `H` carry weight `η w_e`.
    pub system: WeightedMultiGraph,
    /// `ηH` on the same vertex set.
    pub base: WeightedMultiGraph,
    /// 1 on `H`, `τ_e / η` elsewhere.
    pub tau: Vec<f64>,
    pub eta: f64,
}

impl PreconditionerGraph {
    pub fn new(g: &WeightedMultiGraph, sub: &DistortionSubgraph, eta: f64) -> Self {
        let mut in_h = vec![false; g.m()];
        sub.h.iter().for_each(|&id| in_h[id] = true);
        let mut system = Vec::with_capacity(g.m());
        let mut base = Vec::with_capacity(sub.h.len());
        let mut tau = Vec::with_capacity(g.m());
        for (id, e) in g.edges().iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            if in_h[id] {
                let scaled = Edge { w: eta * e.w, ..*e };
                system.push(scaled);
                base.push(scaled);
                tau.push(1.0);
            } else {
                system.push(*e);
                tau.push(sub.tau[id] / eta);
            }
        }
        PreconditionerGraph {
            system: WeightedMultiGraph::from_valid_edges(g.n(), system),
            base: WeightedMultiGraph::from_valid_edges(g.n(), base),
            tau,
            eta,
        }
    }
}

/// Aggregates over every call made at one recursion depth.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelStats {
    pub depth: usize,
    pub calls: usize,
    pub max_n: usize,
    pub max_m: usize,
    /// Calls answered by conjugate gradient (base case or depth cap).
    pub cg_solves: usize,
    pub cg_iterations: usize,
    pub subgraph_edges: usize,
    pub kappa_measured: f64,
    pub eta: f64,
    pub agd_iterations: usize,
    pub richardson_calls: usize,
    pub richardson_iterations: usize,
    pub richardson_skipped: usize,
    pub sampled_edges: usize,
    pub max_sampled_edges: usize,
    pub draws: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub epsilon: f64,
    pub levels: Vec<LevelStats>,
    /// `‖L x_t − b‖ / ‖b‖` after every top-level gradient step.
    pub residual_trajectory: Vec<f64>,
    pub final_relative_residual: f64,
    /// Filled in by callers that can read a clock.
    pub wall_time_secs: Option<f64>,
}

impl SolveReport {
    pub fn level(&self, depth: usize) -> Option<&LevelStats> {
        self.levels.get(depth)
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn stats_at(levels: &mut Vec<LevelStats>, depth: usize) -> &mut LevelStats {
    while levels.len() <= depth {
        let d = levels.len();
        levels.push(LevelStats {
            depth: d,
            ..Default::default()
        });
    }
    &mut levels[depth]
}

/// Solves `L_G x = b` to expected relative A-norm squared error `eps`.
/// `b` is projected onto the range of `L_G` first.
pub fn recursive_solver(
    g: &WeightedMultiGraph,
    b: &[f64],
    eps: f64,
    cfg: &SolverConfig,
    rng: &mut Rng,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("ε must lie in (0,1)"));
    }
    if b.len() != g.n() {
        return Err(invalid("right-hand side length does not match n"));
    }
    let splitter = split_from(rng);
    let mut report = SolveReport {
        epsilon: eps,
        ..Default::default()
    };
    let mut traj = Vec::new();
    let x = solve_level(
        g,
        b,
        eps,
        cfg,
        splitter,
        0,
        &mut report.levels,
        Some(&mut traj),
    )?;
    let (labels, count) = g.components();
    let mut rhs = b.to_vec();
    project_components(&labels, count, &mut rhs);
    let mut lx = vec![0.0; g.n()];
    g.laplacian_apply(&x, &mut lx);
    let bn = norm(&rhs);
    let res: Vec<f64> = lx.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    report.final_relative_residual = if bn > 0.0 { norm(&res) / bn } else { 0.0 };
    report.residual_trajectory = traj;
    Ok((x, report))
}

#[allow(clippy::too_many_arguments)]
fn solve_level(
    g: &WeightedMultiGraph,
    b: &[f64],
    eps: f64,
    cfg: &SolverConfig,
    splitter: StreamSplitter,
    depth: usize,
    levels: &mut Vec<LevelStats>,
    mut traj: Option<&mut Vec<f64>>,
) -> Result<Vec<f64>> {
    let n = g.n();
    let (labels, count) = g.components();
    let mut rhs = b.to_vec();
    project_components(&labels, count, &mut rhs);
    {
        let st = stats_at(levels, depth);
        st.calls += 1;
        st.max_n = st.max_n.max(n);
        st.max_m = st.max_m.max(g.m());
    }
    let bn = norm(&rhs);
    if bn == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let base_case = g.m() <= cfg.base_case_edge_threshold;
    if base_case || depth >= cfg.max_depth {
        let tol = if base_case {
            cfg.base_case_tol
        } else {
            cfg.depth_cap_tol
        };
        let (x, rep) = conjugate_gradient(g, &rhs, tol, cg::default_max_iter(n));
        let st = stats_at(levels, depth);
        st.cg_solves += 1;
        st.cg_iterations += rep.iterations;
        return Ok(x);
    }

    let k = cfg.lowstretch_k(n);
    let mut ps = default_path_sparsifier(cfg.subgraph.path_k, cfg.path.clone());
    let sub = spectral_subgraph(
        g,
        k,
        cfg.p,
        &cfg.subgraph,
        &mut ps,
        &mut splitter.stream(&[0]),
    )?;
    let kappa = cfg.kappa(sub.kappa_measured, n, g.m(), k);
    let eta = cfg.eta(kappa, n, g.m());
    let pre = PreconditionerGraph::new(g, &sub, eta);
    {
        let st = stats_at(levels, depth);
        st.subgraph_edges = st.subgraph_edges.max(sub.h.len());
        st.kappa_measured = st.kappa_measured.max(sub.kappa_measured);
        st.eta = st.eta.max(eta);
    }

    let params = RichardsonParams {
        iters_coeff: cfg.richardson_iters_coeff,
        step: cfg.richardson_step,
        sample_delta: cfg.sample_delta,
        size_check_coeff: cfg.size_check_coeff,
        p: cfg.p,
    };
    let inner_eps = cfg.inner_error(n);
    let richardson_eps = 1.0 / (10.0 * eta);
    let mut agd_step = 0u64;
    let mut inner_calls = 0u64;
    let mut residual = vec![0.0; n];
    let x = precon_noisy_agd_observed(
        &mut |x, out| g.laplacian_apply(x, out),
        &rhs,
        eps,
        &mut |r| {
            agd_step += 1;
            let mut rrng = splitter.stream(&[1, agd_step]);
            let mut inner = |h: &WeightedMultiGraph, c: &[f64]| {
                inner_calls += 1;
                solve_level(
                    h,
                    c,
                    inner_eps,
                    cfg,
                    splitter.child(&[2, inner_calls]),
                    depth + 1,
                    levels,
                    None,
                )
            };
            let (y, rs) = precon_richardson(
                &pre.system,
                &pre.base,
                &pre.tau,
                r,
                richardson_eps,
                &params,
                &mut inner,
                &mut rrng,
            )?;
            let st = stats_at(levels, depth);
            st.richardson_calls += 1;
            st.richardson_iterations += rs.iterations;
            st.richardson_skipped += rs.skipped;
            st.sampled_edges += rs.sampled_edges;
            st.max_sampled_edges = st.max_sampled_edges.max(rs.max_sampled_edges);
            st.draws += rs.draws;
            Ok(y)
        },
        eta,
        &mut |_, x, _| {
            if let Some(t) = traj.as_deref_mut() {
                g.laplacian_apply(x, &mut residual);
                let r: f64 = residual
                    .iter()
                    .zip(&rhs)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                t.push(libm::sqrt(r) / bn);
            }
        },
    )?;
    stats_at(levels, depth).agd_iterations += AgdSchedule::new(eta, eps)?.iterations;
    let mut x = x;
    project_components(&labels, count, &mut x);
    Ok(x)
}
