//! Solver-versus-CG benchmark over generated graph families.

use std::fmt::Write as _;
use std::str::FromStr;
use std::thread;
use std::time::Instant;

use lapsolve_core::config::SolverConfig;
use lapsolve_core::generators;
use lapsolve_core::graph::WeightedMultiGraph;
use lapsolve_core::oracle::{a_norm_error, project_components};
use lapsolve_core::rng::{Rng, StreamSplitter};
use lapsolve_core::solvers::cg::default_max_iter;
use lapsolve_core::solvers::{conjugate_gradient, recursive_solver};
use lapsolve_core::spectral_subgraph::{bucket_edges, AkpwParams};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{CliError, CliResult};

/// Tolerance of the reference solve every error is measured against.
pub const ORACLE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `size × size` grid.
    Grid,
    /// Random `degree`-regular graph on `size` vertices.
    RandomRegular,
    /// Union of `⌈degree/2⌉` random Hamiltonian cycles on `size` vertices.
    Expander,
    /// `size × size` grid with log-uniform weights in `[1, ratio]`.
    HeavyWeights,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grid" => Ok(Family::Grid),
            "random-regular" => Ok(Family::RandomRegular),
            "expander" => Ok(Family::Expander),
            "heavy-weights" => Ok(Family::HeavyWeights),
            _ => Err(format!(
                "unknown family {s:?} (grid, random-regular, expander, heavy-weights)"
            )),
        }
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Grid => "grid",
            Family::RandomRegular => "random-regular",
            Family::Expander => "expander",
            Family::HeavyWeights => "heavy-weights",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub seeds: usize,
    pub first_seed: u64,
    pub eps: f64,
    pub degree: usize,
    pub ratio: f64,
    pub threads: usize,
    pub config: SolverConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub family: &'static str,
    pub size: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Weight classes the spectral subgraph would use at the top level.
    pub buckets: usize,
    pub solver_iterations: usize,
    pub solver_secs: f64,
    pub solver_error: f64,
    pub cg_iterations: usize,
    pub cg_secs: f64,
    pub cg_error: f64,
}

fn hamiltonian_union(n: usize, cycles: usize, rng: &mut Rng) -> WeightedMultiGraph {
    let mut pairs = Vec::with_capacity(n * cycles);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..cycles {
        order.shuffle(rng);
        for i in 0..n {
            pairs.push((order[i], order[(i + 1) % n]));
        }
    }
    WeightedMultiGraph::unweighted(n, pairs).expect("cycle endpoints are in range")
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn instance(
    family: Family,
    size: usize,
    degree: usize,
    ratio: f64,
    rng: &mut Rng,
) -> CliResult<WeightedMultiGraph> {
    let bad = |msg: String| Err(CliError::Input(msg));
    match family {
        Family::Grid => Ok(generators::grid(size, size)),
        Family::HeavyWeights => {
            if !(ratio >= 1.0) {
                return bad(format!("weight ratio {ratio} must be at least 1"));
            }
            Ok(generators::heavy_weight_grid(size, size, ratio, rng))
        }
        Family::RandomRegular => {
            if degree >= size || (degree * size) % 2 == 1 || degree == 0 {
                return bad(format!(
                    "no simple {degree}-regular graph on {size} vertices"
                ));
            }
            Ok(generators::random_regular(size, degree, rng))
        }
        Family::Expander => {
            if size < 3 || degree == 0 {
                return bad("expander needs at least 3 vertices and degree ≥ 1".into());
            }
            Ok(hamiltonian_union(size, degree.div_ceil(2), rng))
        }
    }
}

/// Uniform random right-hand side with zero mean on every component.
pub fn random_rhs(g: &WeightedMultiGraph, rng: &mut Rng) -> Vec<f64> {
    let mut b: Vec<f64> = (0..g.n()).map(|_| rng.gen::<f64>() - 0.5).collect();
    let (labels, count) = g.components();
    project_components(&labels, count, &mut b);
    b
}

/// `‖x − x*‖²_L / ‖x*‖²_L` (0 when `x*` is 0 and `x` matches it).
pub fn relative_error(g: &WeightedMultiGraph, x: &[f64], xstar: &[f64]) -> f64 {
    let err = a_norm_error(g, x, xstar).expect("lengths match");
    let scale = g.quadratic_form(xstar);
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

pub fn bucket_count(g: &WeightedMultiGraph, cfg: &SolverConfig) -> CliResult<usize> {
    if g.m() == 0 {
        return Ok(0);
    }
    let params = AkpwParams::with_config(cfg.lowstretch_k(g.n()), cfg.p, &cfg.subgraph)?;
    Ok(bucket_edges(g, params.delta)?.count)
}

fn run_one(opts: &BenchOptions, size: usize, seed: u64) -> CliResult<BenchRow> {
    let streams = StreamSplitter::new(seed);
    let g = instance(
        opts.family,
        size,
        opts.degree,
        opts.ratio,
        &mut streams.stream(&[0]),
    )?;
    let b = random_rhs(&g, &mut streams.stream(&[1]));
    let (xstar, _) = conjugate_gradient(&g, &b, ORACLE_TOL, 10 * default_max_iter(g.n()));

    let t = Instant::now();
    let (x, report) = recursive_solver(&g, &b, opts.eps, &opts.config, &mut streams.stream(&[2]))?;
    let solver_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (xc, cg) = conjugate_gradient(&g, &b, opts.eps, default_max_iter(g.n()));
    let cg_secs = t.elapsed().as_secs_f64();

    Ok(BenchRow {
        family: opts.family.name(),
        size,
        n: g.n(),
        m: g.m(),
        seed,
        buckets: bucket_count(&g, &opts.config)?,
        solver_iterations: report.levels.first().map_or(0, |l| l.agd_iterations),
        solver_secs,
        solver_error: relative_error(&g, &x, &xstar),
        cg_iterations: cg.iterations,
        cg_secs,
        cg_error: relative_error(&g, &xc, &xstar),
    })
}

/// Runs every `(size, seed)` pair, spreading seeds over `threads` workers.
/// Rows come back ordered by size, then seed.
pub fn run_bench(opts: &BenchOptions) -> CliResult<Vec<BenchRow>> {
    let jobs: Vec<(usize, u64)> = opts
        .sizes
        .iter()
        .flat_map(|&s| (0..opts.seeds as u64).map(move |i| (s, opts.first_seed + i)))
        .collect();
    let threads = opts.threads.clamp(1, jobs.len().max(1));
    let mut results: Vec<Option<CliResult<BenchRow>>> = (0..jobs.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let jobs = &jobs;
                scope.spawn(move || {
                    (w..jobs.len())
                        .step_by(threads)
                        .map(|j| (j, run_one(opts, jobs[j].0, jobs[j].1)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (j, r) in h.join().expect("bench worker panicked") {
                results[j] = Some(r);
            }
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

pub const CSV_HEADER: &str = "family,size,n,m,seed,buckets,solver_iterations,solver_secs,solver_error,cg_iterations,cg_secs,cg_error";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{:.6},{:e},{},{:.6},{:e}",
            r.family,
            r.size,
            r.n,
            r.m,
            r.seed,
            r.buckets,
            r.solver_iterations,
            r.solver_secs,
            r.solver_error,
            r.cg_iterations,
            r.cg_secs,
            r.cg_error
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use lapsolve_core::rng::seeded;

    #[test]
    fn families_have_expected_shape() {
        let mut rng = seeded(1);
        assert_eq!(instance(Family::Grid, 5, 0, 1.0, &mut rng).unwrap().m(), 40);
        let g = instance(Family::RandomRegular, 20, 4, 1.0, &mut rng).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4.0));
        let g = instance(Family::Expander, 30, 4, 1.0, &mut rng).unwrap();
        assert_eq!(g.m(), 60);
        assert!(g.is_connected());
        assert!(instance(Family::RandomRegular, 5, 3, 1.0, &mut rng).is_err());
    }

    #[test]
    fn heavy_weights_span_several_buckets() {
        let g = instance(Family::HeavyWeights, 16, 0, 1e6, &mut seeded(2)).unwrap();
        let buckets = bucket_count(&g, &SolverConfig::desk()).unwrap();
        assert!(buckets >= 2, "{buckets}");
    }

    #[test]
    fn small_grid_row() {
        let opts = BenchOptions {
            family: Family::Grid,
            sizes: vec![8],
            seeds: 2,
            first_seed: 0,
            eps: 1e-8,
            degree: 8,
            ratio: 1.0,
            threads: 2,
            config: SolverConfig::desk(),
        };
        let rows = run_bench(&opts).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].seed, 1);
        for r in &rows {
            assert!(r.solver_error <= 1e-8);
        }
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
    }
}
