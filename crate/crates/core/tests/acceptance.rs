//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Pass criterion numbers as arguments to
//! run a subset.

// Negated comparisons are intentional: a NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::Instant;

use lapsolve_core::config::{
    PathSparsifyConfig, SolverConfig, SubgraphConfig, TauRule, UltraConfig,
};
use lapsolve_core::decompose::decompose;
use lapsolve_core::generators;
use lapsolve_core::oracle::{effective_resistance, pinv_solve, DenseMatrix};
use lapsolve_core::path_sparsify::{
    partial_path_sparsify, uniform_sample_graph, verify_claims, vertex_disjoint_count,
    VerifyOptions,
};
use lapsolve_core::rng::{seeded, Rng, StreamSplitter};
use lapsolve_core::solvers::agd::AgdSchedule;
use lapsolve_core::solvers::cg::default_max_iter;
use lapsolve_core::solvers::{
    conjugate_gradient, precon_noisy_agd, precon_richardson_observed, recursive_solver,
    RichardsonParams,
};
use lapsolve_core::spectral_subgraph::{default_path_sparsifier, spectral_subgraph};
use lapsolve_core::ultrasparsify::{bss_augment, greedy_trace_removal, ultrasparsify, BssAugment};
use lapsolve_core::{build_graph, WeightedMultiGraph};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;

/// Relative slack for comparisons that are exact in real arithmetic but
/// computed in floating point.
const FLOAT_SLACK: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------------------
// Test-local oracles, written against nalgebra only.

fn dense_laplacian(g: &WeightedMultiGraph) -> DenseMatrix {
    let mut l = DMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        if e.u == e.v {
            continue;
        }
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

fn eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `a ⪯ b` with slack relative to the larger spectral norm.
fn loewner_le(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    let scale = eigenvalues(a)
        .iter()
        .chain(eigenvalues(b).iter())
        .fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
    eigenvalues(&(b - a))[0] >= -FLOAT_SLACK * scale
}

fn component_labels(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// All-pairs effective resistances by grounding one vertex per component
/// and inverting the reduced Laplacian with a Cholesky factorization.
struct GroundedResistance {
    label: Vec<usize>,
    x: DenseMatrix,
}

impl GroundedResistance {
    fn new(g: &WeightedMultiGraph) -> Self {
        let n = g.n();
        let label = component_labels(n, g.edges().iter().map(|e| (e.u, e.v)));
        let l = dense_laplacian(g);
        let mut x = DMatrix::zeros(n, n);
        let mut roots: Vec<usize> = label.clone();
        roots.sort_unstable();
        roots.dedup();
        for root in roots {
            let members: Vec<usize> = (0..n).filter(|&v| label[v] == root).collect();
            let free: Vec<usize> = members[1..].to_vec();
            if free.is_empty() {
                continue;
            }
            let red = DMatrix::from_fn(free.len(), free.len(), |i, j| l[(free[i], free[j])]);
            let inv = red
                .cholesky()
                .expect("reduced Laplacian of a connected piece is SPD")
                .inverse();
            for (i, &a) in free.iter().enumerate() {
                for (j, &b) in free.iter().enumerate() {
                    x[(a, b)] = inv[(i, j)];
                }
            }
        }
        GroundedResistance { label, x }
    }

    fn r(&self, a: usize, b: usize) -> f64 {
        if a == b {
            0.0
        } else if self.label[a] != self.label[b] {
            f64::INFINITY
        } else {
            self.x[(a, a)] + self.x[(b, b)] - 2.0 * self.x[(a, b)]
        }
    }
}

fn random_rhs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mean = b.iter().sum::<f64>() / n as f64;
    b.iter_mut().for_each(|x| *x -= mean);
    b
}

fn error_ratio(g: &WeightedMultiGraph, x: &[f64], xstar: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(xstar).map(|(a, b)| a - b).collect();
    g.quadratic_form(&diff) / g.quadratic_form(xstar)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn log_uniform(lo: f64, hi: f64, rng: &mut Rng) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp()
}

fn complete_laplacian(n: usize) -> DenseMatrix {
    DMatrix::from_fn(n, n, |i, j| if i == j { n as f64 - 1.0 } else { -1.0 })
}

// ---------------------------------------------------------------------------

fn solver_end_to_end() -> Outcome {
    const EPS: f64 = 1e-8;
    const SEEDS: u64 = 20;
    const TIME_LIMIT: f64 = 30.0;
    let cfg = SolverConfig::desk();
    let mut pass = true;
    let mut parts = Vec::new();
    let families: Vec<(String, usize)> = [16, 32, 64]
        .iter()
        .map(|s| (format!("grid{s}"), *s))
        .chain([256, 1024, 4096].iter().map(|n| (format!("reg8-{n}"), *n)))
        .collect();
    for (fi, (name, size)) in families.iter().enumerate() {
        let mut errors = Vec::new();
        let mut slowest: f64 = 0.0;
        let mut oracle_ok = true;
        for seed in 0..SEEDS {
            let streams = StreamSplitter::new(1000 * fi as u64 + seed);
            let g = if name.starts_with("grid") {
                generators::grid(*size, *size)
            } else {
                generators::random_regular(*size, 8, &mut streams.stream(&[0]))
            };
            let b = random_rhs(g.n(), &mut streams.stream(&[1]));
            let (xstar, _) = conjugate_gradient(&g, &b, 1e-14, 10 * default_max_iter(g.n()));
            let mut res = vec![0.0; g.n()];
            g.laplacian_apply(&xstar, &mut res);
            let rnorm: f64 = res
                .iter()
                .zip(&b)
                .map(|(r, b)| (r - b) * (r - b))
                .sum::<f64>()
                .sqrt();
            let bnorm: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            oracle_ok &= rnorm <= 1e-12 * bnorm;
            let t = Instant::now();
            let (x, _) = recursive_solver(&g, &b, EPS, &cfg, &mut streams.stream(&[2]))
                .expect("solver runs");
            slowest = slowest.max(t.elapsed().as_secs_f64());
            errors.push(error_ratio(&g, &x, &xstar));
        }
        let med = median(errors);
        let ok = med <= EPS && slowest < TIME_LIMIT && oracle_ok;
        pass &= ok;
        parts.push(format!(
            "{name} median {med:.1e} max {slowest:.1}s{}",
            if oracle_ok { "" } else { " ORACLE" }
        ));
    }
    outcome(pass, parts.join(", "))
}

fn agd_schedule() -> Outcome {
    const EPS: f64 = 1e-6;
    let mut pass = true;
    let mut worst = Vec::new();
    for kappa in [4.0f64, 16.0, 64.0] {
        let schedule = AgdSchedule::new(kappa, EPS).unwrap();
        let expected_t = (4.0 * kappa.sqrt() * (2.0 / EPS).ln()).ceil() as usize;
        pass &= schedule.iterations == expected_t;
        let mut max_ratio: f64 = 0.0;
        for seed in 0..20u64 {
            let mut rng = seeded(5000 + seed + 100 * kappa as u64);
            let n = 20 + rng.gen_range(0..60);
            let g = generators::random_weighted(n, 3 * n, 1.0, 10.0, &mut rng);
            let eig = SymmetricEigen::new(dense_laplacian(&g));
            let top = eig.eigenvalues.max();
            let range: Vec<usize> = (0..n)
                .filter(|&i| eig.eigenvalues[i] > 1e-9 * top)
                .collect();
            let lambda2 = range
                .iter()
                .map(|&i| eig.eigenvalues[i])
                .fold(f64::INFINITY, f64::min);
            let shift = (kappa - 1.0) * lambda2;
            let apply = |r: &[f64], shift: f64, inverse: bool| -> Vec<f64> {
                let r = DVector::from_column_slice(r);
                let mut out = DVector::zeros(n);
                for &i in &range {
                    let v = eig.eigenvectors.column(i);
                    let lam = eig.eigenvalues[i] + shift;
                    out += v * (v.dot(&r) * if inverse { 1.0 / lam } else { lam });
                }
                out.iter().copied().collect()
            };
            let b = random_rhs(n, &mut rng);
            let xstar = apply(&b, 0.0, true);
            let x = precon_noisy_agd(
                &mut |x, out| g.laplacian_apply(x, out),
                &b,
                EPS,
                &mut |r| Ok(apply(r, shift, true)),
                kappa,
            )
            .unwrap();
            let ratio = error_ratio(&g, &x, &xstar) / EPS;
            max_ratio = max_ratio.max(ratio);
        }
        pass &= max_ratio <= 1.0;
        worst.push(format!(
            "κ={kappa} T={expected_t} max err/ε {max_ratio:.2e}"
        ));
    }
    outcome(pass, worst.join(", "))
}

fn tau_validity() -> Outcome {
    let p = SolverConfig::default_p();
    let rules = [TauRule::TreeStretch, TauRule::Paper, TauRule::Min];
    let mut bad_edges = 0usize;
    let mut bad_graphs = 0usize;
    let mut edges = 0usize;
    let mut worst_margin = f64::INFINITY;
    for i in 0..50u64 {
        let mut rng = seeded(7000 + i);
        let n = 20 + (i as usize * 280) / 49;
        let m = (n * (2 + i as usize % 5)).min(n * (n - 1) / 2);
        let hi: f64 = [1.0, 10.0, 1e3, 1e5][i as usize % 4];
        let g = generators::random_weighted(n, m, 1.0, hi, &mut rng);
        let k = [4.0, 8.0, 16.0][i as usize % 3];
        let cfg = SubgraphConfig {
            tau_rule: rules[i as usize % 3],
            ..SubgraphConfig::desk()
        };
        let mut ps = default_path_sparsifier(1, PathSparsifyConfig::desk());
        let sub = spectral_subgraph(&g, k, p, &cfg, &mut ps, &mut rng).expect("subgraph builds");
        let h = build_graph(
            n,
            sub.h.iter().map(|&id| {
                let e = g.edge(id);
                (e.u, e.v, e.w)
            }),
        )
        .unwrap();
        let oracle = GroundedResistance::new(&h);
        let mut distortion = 0.0;
        let mut norm = 0.0;
        let mut graph_ok = true;
        for (id, e) in g.edges().iter().enumerate() {
            if e.u == e.v {
                continue;
            }
            edges += 1;
            let lev = e.w * oracle.r(e.u, e.v);
            distortion += lev.powf(p);
            if sub.tau[id] > 0.0 {
                norm += sub.tau[id].powf(p);
            }
            worst_margin = worst_margin.min(sub.tau[id] / lev);
            if !(sub.tau[id] >= lev * (1.0 - FLOAT_SLACK)) {
                bad_edges += 1;
                graph_ok = false;
            }
        }
        if !(distortion <= norm * (1.0 + FLOAT_SLACK))
            || (norm - sub.kappa_measured).abs() > FLOAT_SLACK * norm
        {
            graph_ok = false;
        }
        bad_graphs += usize::from(!graph_ok);
    }
    outcome(
        bad_edges == 0 && bad_graphs == 0,
        format!("{edges} edges, {bad_edges} with τ < w·R_H, {bad_graphs}/50 graphs failing, min τ/(w·R_H) {worst_margin:.4}"),
    )
}

fn decompose_invariants() -> Outcome {
    let mut violations = 0usize;
    let mut structure = 0usize;
    for i in 0..200u64 {
        let mut rng = seeded(9000 + i);
        let n = 3 + rng.gen_range(0..120);
        let g = match i % 3 {
            0 => generators::random_connected(n, n - 1 + rng.gen_range(0..3 * n), &mut rng),
            1 => generators::gnp(n, rng.gen_range(0.02..0.3), &mut rng),
            _ => {
                let mut edges: Vec<(usize, usize, f64)> = Vec::new();
                for _ in 0..2 * n {
                    edges.push((rng.gen_range(0..n), rng.gen_range(0..n), 1.0));
                }
                build_graph(n, edges).unwrap()
            }
        };
        let nb = 1 + (i as usize) % 4;
        let buckets: Vec<usize> = (0..g.m()).map(|_| rng.gen_range(0..nb)).collect();
        let beta = rng.gen_range(0.005..=1.0 / 6.0);
        let r = rng.gen_range(0..8);
        let d = decompose(&g, &buckets, nb, beta, r).expect("valid parameters");

        let mut piece = vec![usize::MAX; n];
        for (pi, p) in d.pieces.iter().enumerate() {
            for &v in p {
                if piece[v] != usize::MAX {
                    structure += 1;
                }
                piece[v] = pi;
            }
        }
        structure += piece.iter().filter(|&&p| p == usize::MAX).count();

        let m = g.m() as f64;
        let decay = (-(r as f64) * beta / nb as f64).exp();
        let mut size = vec![0usize; nb];
        let mut cut = vec![0usize; nb];
        for (id, e) in g.edges().iter().enumerate() {
            size[buckets[id]] += 1;
            if piece[e.u] != piece[e.v] {
                cut[buckets[id]] += 1;
            }
        }
        for j in 0..nb {
            let bound = 6.0 * beta * size[j] as f64 + 6.0 * beta * m * decay;
            if cut[j] as f64 > bound * (1.0 + 1e-12) {
                violations += 1;
            }
        }

        let mut trees = 0usize;
        for (pi, forest) in d.trees.iter().enumerate() {
            let mut covered: Vec<usize> = Vec::new();
            for t in &forest.trees {
                trees += 1;
                covered.extend(&t.vertices);
                let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
                for (idx, par) in t.parent.iter().enumerate() {
                    if let Some((pv, eid)) = *par {
                        let e = g.edge(eid);
                        let v = t.vertices[idx];
                        let fits = (e.u == pv && e.v == v) || (e.v == pv && e.u == v);
                        if !fits || piece[v] != pi || piece[pv] != pi {
                            structure += 1;
                        }
                        adj[pv].push(v);
                        adj[v].push(pv);
                    }
                }
                let mut depth = vec![usize::MAX; n];
                depth[t.root] = 0;
                let mut queue = std::collections::VecDeque::from([t.root]);
                while let Some(u) = queue.pop_front() {
                    for &w in &adj[u] {
                        if depth[w] == usize::MAX {
                            depth[w] = depth[u] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                for &v in &t.vertices {
                    if depth[v] == usize::MAX {
                        structure += 1;
                    } else if depth[v] > r {
                        violations += 1;
                    }
                }
            }
            covered.sort_unstable();
            let mut expect = d.pieces[pi].clone();
            expect.sort_unstable();
            if covered != expect {
                structure += 1;
            }
        }
        if trees as f64 > (d.pieces.len() as f64 + 4.0 * m * decay) * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && structure == 0,
        format!("200 instances, {violations} bound violations, {structure} structural defects"),
    )
}

fn partial_path_sparsification() -> Outcome {
    const MIN_RATE: f64 = 0.95;
    let cfg = PathSparsifyConfig::desk();
    let mut cut_failures = 0usize;
    let mut trivial = 0usize;
    let mut checked = 0usize;
    let mut passed = 0usize;
    let mut min_rate: f64 = 1.0;
    let mut max_cut: f64 = 0.0;
    for i in 0..30u64 {
        let mut rng = seeded(11000 + i);
        let (g, k) = if i % 2 == 0 {
            (
                generators::complete(100 + 10 * (i as usize / 2)),
                [1.0, 1.25, 1.5][i as usize % 3],
            )
        } else {
            (
                generators::gnp(
                    150 + 7 * i as usize,
                    0.75 + 0.02 * (i % 10) as f64,
                    &mut rng,
                ),
                1.0,
            )
        };
        let m = g.m();
        let out = partial_path_sparsify(&g, k, &cfg, &mut rng).expect("dense instance");
        if out.p >= 1.0 {
            trivial += 1;
        }
        if out.f.len() + out.e_cut.len() + out.covered.len() != m || 2 * out.e_cut.len() > m {
            cut_failures += 1;
        }
        max_cut = max_cut.max(out.e_cut.len() as f64 / m as f64);
        let rep = verify_claims(&g, &out.f, &out.path_claims(), VerifyOptions::default());
        checked += rep.checks.len();
        passed += rep.passed();
        min_rate = min_rate.min(rep.pass_rate());
    }
    let pooled = if checked == 0 {
        1.0
    } else {
        passed as f64 / checked as f64
    };
    outcome(
        cut_failures == 0 && trivial == 0 && min_rate >= MIN_RATE,
        format!(
            "30 runs ({trivial} trivial), {cut_failures} with |E_cut| > |E|/2 (max {max_cut:.3}), \
             peeling certified {passed}/{checked} = {pooled:.4}, worst run {min_rate:.4}"
        ),
    )
}

fn uniform_sampling() -> Outcome {
    const C_UNIF: f64 = 16.0;
    const TRIALS: u64 = 100;
    let mut sandwich_ok = 0;
    let mut degree_ok = 0;
    let mut trivial = 0;
    for i in 0..TRIALS {
        let mut rng = seeded(13000 + i);
        let g = if i % 2 == 0 {
            generators::complete(100 + (i as usize % 5) * 25)
        } else {
            generators::gnp(
                120 + (i as usize % 5) * 20,
                0.85 + 0.02 * (i % 5) as f64,
                &mut rng,
            )
        };
        let n = g.n();
        let deg: Vec<usize> = (0..n).map(|v| g.edge_degree(v)).collect();
        let d = *deg.iter().min().unwrap() as f64;
        let s = uniform_sample_graph(&g, d, C_UNIF, &mut rng);
        let p = s.p;
        if p >= 1.0 {
            trivial += 1;
        }
        let mut hdeg = vec![0usize; n];
        for e in s.graph.edges() {
            hdeg[e.u] += 1;
            hdeg[e.v] += 1;
        }
        if (0..n).all(|v| {
            hdeg[v] as f64 >= p / 2.0 * deg[v] as f64 && hdeg[v] as f64 <= 2.0 * p * deg[v] as f64
        }) {
            degree_ok += 1;
        }
        let lg = dense_laplacian(&g) * p;
        let lh = dense_laplacian(&s.graph);
        let slack = complete_laplacian(n) * (p * d / n as f64);
        let lo = &lh * 0.5 - &slack;
        let hi = &lh * 1.5 + &slack;
        if loewner_le(&lo, &lg) && loewner_le(&lg, &hi) {
            sandwich_ok += 1;
        }
    }
    outcome(
        sandwich_ok >= 99 && degree_ok >= 99 && trivial == 0,
        format!("C_unif={C_UNIF}: sandwich {sandwich_ok}/100, degree window {degree_ok}/100, {trivial} trials with p = 1"),
    )
}

fn richardson_rate() -> Outcome {
    const SEEDS: u64 = 200;
    const T: usize = 40;
    let bound = (1.0 - 1.0 / 200.0) * 1.05;
    let params = RichardsonParams {
        iters_coeff: 1.0,
        step: 0.1,
        sample_delta: 0.1,
        size_check_coeff: 1600.0,
        p: 0.72,
    };
    let systems = [
        generators::grid(6, 6),
        generators::random_weighted(40, 100, 1.0, 20.0, &mut seeded(15000)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (si, g) in systems.iter().enumerate() {
        let n = g.n();
        let oracle = GroundedResistance::new(g);
        let tau: Vec<f64> = g.edges().iter().map(|e| e.w * oracle.r(e.u, e.v)).collect();
        let b = random_rhs(n, &mut seeded(15100 + si as u64));
        let xstar = pinv_solve(g, &b).unwrap();
        let mut mean = vec![0.0; T + 1];
        mean[0] = 1.0;
        for seed in 0..SEEDS {
            let mut traj = vec![f64::NAN; T + 1];
            precon_richardson_observed(
                g,
                g,
                &tau,
                &b,
                (-(T as f64)).exp(),
                &params,
                &mut |h, c| pinv_solve(h, c),
                &mut seeded(16000 + 1000 * si as u64 + seed),
                &mut |t, x| {
                    if t <= T {
                        traj[t] = error_ratio(g, x, &xstar);
                    }
                },
            )
            .unwrap();
            for t in 1..=T {
                mean[t] += traj[t] / SEEDS as f64;
            }
        }
        let worst_step = (0..T).map(|t| mean[t + 1] / mean[t]).fold(0.0, f64::max);
        let geometric = mean[T].powf(1.0 / T as f64);
        let ok = worst_step <= bound && mean.iter().all(|x| x.is_finite());
        pass &= ok;
        parts.push(format!(
            "n={n}: worst step {worst_step:.4}, geometric {geometric:.4}"
        ));
    }
    outcome(pass, format!("bound {bound:.5}; {}", parts.join(", ")))
}

fn ultrasparsifier(bss_runs: &mut Vec<BssAugment>) -> Outcome {
    let cfg = UltraConfig::default();
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20usize {
        let mut rng = seeded(17000 + i as u64);
        let k = [2.0, 3.0, 4.0][i % 3];
        let (n, m) = if i == 19 {
            (40, 780)
        } else {
            (20 + 4 * i, (20 + 4 * i) * (3 + i % 6))
        };
        let g = generators::random_weighted(
            n,
            m.min(n * (n - 1) / 2),
            1.0,
            [10.0, 100.0, 1000.0][i % 3],
            &mut rng,
        );
        let u = match ultrasparsify(&g, k, &cfg, &mut rng) {
            Ok(u) => u,
            Err(e) => {
                failures.push(format!("#{i}: {e}"));
                continue;
            }
        };
        bss_runs.push(u.augment.clone());
        let h = &u.h;
        let mut ok = h.n() == n && (h.m() as f64) <= n as f64 + 2.0 * n as f64 / k;
        ok &= u.edge_ids.len() == h.m()
            && u.edge_ids.iter().zip(h.edges()).all(|(&id, e)| {
                let ge = g.edge(id);
                (ge.u, ge.v) == (e.u, e.v) || (ge.v, ge.u) == (e.u, e.v)
            });
        let lg = dense_laplacian(&g);
        let lh = dense_laplacian(h);
        ok &= loewner_le(&lh, &lg);
        let eig = SymmetricEigen::new(lh.clone());
        let top = eig.eigenvalues.max();
        let range: Vec<usize> = (0..n)
            .filter(|&j| eig.eigenvalues[j] > 1e-10 * top)
            .collect();
        let lambda_max = if range.len() + 1 != n {
            f64::INFINITY
        } else {
            let mut basis = DMatrix::zeros(n, range.len());
            for (c, &j) in range.iter().enumerate() {
                basis.set_column(c, &(eig.eigenvectors.column(j) / eig.eigenvalues[j].sqrt()));
            }
            eigenvalues(&(basis.transpose() * &lg * &basis))
                .last()
                .copied()
                .unwrap()
        };
        let limit = 108.0 * k * k;
        ok &= lambda_max <= limit;
        worst_ratio = worst_ratio.max(lambda_max / limit);
        let vectors = u.removal.selected.len() + u.removal.removed.len();
        ok &= u.removal.final_trace <= vectors as f64 * k && u.removal.step_violations == 0;
        if !ok {
            failures.push(format!(
                "#{i} (n={n}, k={k}): |E(H)|={} λmax={lambda_max:.1} trace={:.1}/{}",
                h.m(),
                u.removal.final_trace,
                vectors as f64 * k
            ));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 graphs, worst λmax/108k² {worst_ratio:.3}{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    )
}

fn normalized_gaussian(n: usize, m: usize, rng: &mut Rng) -> DenseMatrix {
    let v = DMatrix::from_fn(n, m, |_, _| {
        let u1: f64 = rng.gen::<f64>().max(1e-300);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    let eig = SymmetricEigen::new(&v * v.transpose());
    let d = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&x| 1.0 / x.sqrt()));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose() * v
}

fn bss_potentials(mut runs: Vec<BssAugment>) -> Outcome {
    let cfg = UltraConfig::default();
    for i in 0..30u64 {
        let mut rng = seeded(19000 + i);
        let n = 5 + rng.gen_range(0..36);
        let m = n * (3 + rng.gen_range(0..6));
        let k = [1.5, 2.0, 3.0][i as usize % 3];
        let v = normalized_gaussian(n, m, &mut rng);
        let removal = greedy_trace_removal(&v, k, &cfg).unwrap();
        let mut a = DMatrix::zeros(n, n);
        for &c in &removal.selected {
            a += v.column(c) * v.column(c).transpose();
        }
        runs.push(bss_augment(&a, &v, 1.0 / (18.0 * k * k), &cfg).unwrap());
    }
    let mut reported = 0usize;
    let mut snapshot_breaches = 0usize;
    let mut final_breaches = 0usize;
    let mut steps = 0usize;
    for r in &runs {
        reported += r.violations;
        steps += r.steps();
        for s in &r.snapshots {
            if s.phi_upper > r.gamma_upper * (1.0 + FLOAT_SLACK)
                || s.phi_lower > r.gamma_lower * (1.0 + FLOAT_SLACK)
            {
                snapshot_breaches += 1;
            }
        }
        let last = r.snapshots.last().unwrap();
        let lam = eigenvalues(&r.result);
        let inside = lam.iter().all(|&x| x > last.l && x < last.u);
        let phi_u: f64 = lam.iter().map(|&x| 1.0 / (last.u - x)).sum();
        let phi_l: f64 = lam.iter().map(|&x| 1.0 / (x - last.l)).sum();
        if !inside
            || phi_u > r.gamma_upper * (1.0 + FLOAT_SLACK)
            || phi_l > r.gamma_lower * (1.0 + FLOAT_SLACK)
        {
            final_breaches += 1;
        }
    }
    outcome(
        reported == 0 && snapshot_breaches == 0 && final_breaches == 0,
        format!(
            "{} runs, {steps} steps: {reported} reported violations, {snapshot_breaches} snapshot breaches, \
             {final_breaches} recomputed final breaches",
            runs.len()
        ),
    )
}

/// `min |N(S) \ S| / min(|S|, |V \ S|)` over all nonempty proper `S` of
/// `Q_dim`, as a reduced fraction. Translations are automorphisms, so `S`
/// may be assumed to contain vertex 0.
fn hypercube_vertex_expansion(dim: u32) -> (u32, u32) {
    let n = 1u32 << dim;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // `lower[i]` marks the vertices whose bit `i` is clear.
    let lower: Vec<u64> = (0..dim)
        .map(|i| {
            (0..n)
                .filter(|v| v & (1 << i) == 0)
                .fold(0u64, |m, v| m | (1 << v))
        })
        .collect();
    let mut best = (u32::MAX, 1u32);
    for x in 0..(1u64 << (n - 1)) {
        let s = (x << 1) | 1;
        if s == full {
            continue;
        }
        let mut nb = 0u64;
        for (i, &mask) in lower.iter().enumerate() {
            let shift = 1u32 << i;
            nb |= ((s & mask) << shift) | ((s >> shift) & mask);
        }
        let boundary = (nb & !s).count_ones();
        let size = s.count_ones().min(n - s.count_ones());
        if (boundary as u64) * (best.1 as u64) < (best.0 as u64) * (size as u64) {
            best = (boundary, size);
        }
    }
    best
}

fn vertex_expansion_paths() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for dim in [4u32, 5] {
        let (num, den) = hypercube_vertex_expansion(dim);
        let phi = num as f64 / den as f64;
        let g = generators::hypercube(dim as usize);
        let need = phi * dim as f64 / 8.0;
        let mut min_count = usize::MAX;
        for s in 0..g.n() {
            for t in s + 1..g.n() {
                min_count = min_count.min(vertex_disjoint_count(&g, s, t));
            }
        }
        pass &= min_count as f64 >= need;
        parts.push(format!(
            "Q{dim}: φ_vert={num}/{den}, min paths {min_count} ≥ {need:.3}"
        ));
    }
    outcome(pass, parts.join(", "))
}

fn resistance_facts() -> Outcome {
    let mut triangle = 0usize;
    let mut monotone = 0usize;
    let mut mismatch = 0usize;
    for i in 0..500u64 {
        let mut rng = seeded(21000 + i);
        let n = 3 + rng.gen_range(0..58);
        let m = (n - 1 + rng.gen_range(0..3 * n)).min(n * (n - 1) / 2);
        let g = generators::random_weighted(n, m, 0.1, 10.0, &mut rng);
        let keep = rng.gen_range(0.3..1.0);
        let h = build_graph(
            n,
            g.edges()
                .iter()
                .filter(|_| rng.gen::<f64>() < keep)
                .map(|e| (e.u, e.v, e.w)),
        )
        .unwrap();
        let rg = GroundedResistance::new(&g);
        let rh = GroundedResistance::new(&h);
        let mut pick = [0usize; 3];
        pick[0] = rng.gen_range(0..n);
        pick[1] = (pick[0] + 1 + rng.gen_range(0..n - 1)) % n;
        pick[2] = rng.gen_range(0..n);
        let [a, b, c] = pick;
        for (x, y) in [(a, b), (b, c), (a, c)] {
            let lib = effective_resistance(&g, x, y).unwrap();
            let own = rg.r(x, y);
            if (lib - own).abs() > 1e-8 * own.max(1e-12) {
                mismatch += 1;
            }
            if !(rg.r(x, y) <= rh.r(x, y) * (1.0 + FLOAT_SLACK)) {
                monotone += 1;
            }
        }
        for r in [&rg, &rh] {
            let lhs = r.r(a, c);
            let rhs = r.r(a, b) + r.r(b, c);
            if lhs.is_finite() && !(lhs <= rhs * (1.0 + FLOAT_SLACK) + 1e-15) {
                triangle += 1;
            }
        }
    }

    let mut treefact = 0usize;
    let mut tightest: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = seeded(23000 + i);
        let n1 = 2 + rng.gen_range(0..15);
        let n2 = 2 + rng.gen_range(0..15);
        let paths = 1 + rng.gen_range(0..6);
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut tree_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n1 + n2];
        for (offset, size) in [(0, n1), (n1, n2)] {
            for v in 1..size {
                let (a, b) = (offset + v, offset + rng.gen_range(0..v));
                let w = log_uniform(0.2, 5.0, &mut rng);
                edges.push((a, b, w));
                tree_adj[a].push((b, 1.0 / w));
                tree_adj[b].push((a, 1.0 / w));
            }
        }
        let mut d: f64 = 0.0;
        for s in 0..n1 + n2 {
            let mut dist = vec![f64::NAN; n1 + n2];
            dist[s] = 0.0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, r) in &tree_adj[u] {
                    if dist[v].is_nan() {
                        dist[v] = dist[u] + r;
                        stack.push(v);
                    }
                }
            }
            d = d.max(
                dist.iter()
                    .filter(|x| !x.is_nan())
                    .fold(0.0, |m: f64, &x| m.max(x)),
            );
        }
        let mut next = n1 + n2;
        let mut ell: f64 = 0.0;
        for _ in 0..paths {
            let hops = 1 + rng.gen_range(0..5);
            let mut prev = rng.gen_range(0..n1);
            let end = n1 + rng.gen_range(0..n2);
            let mut length = 0.0;
            for h in 0..hops {
                let to = if h + 1 == hops {
                    end
                } else {
                    next += 1;
                    next - 1
                };
                let w = log_uniform(0.2, 5.0, &mut rng);
                edges.push((prev, to, w));
                length += 1.0 / w;
                prev = to;
            }
            ell = ell.max(length);
        }
        let g = build_graph(next, edges).unwrap();
        let rg = GroundedResistance::new(&g);
        let bound = 2.0 * d + ell / paths as f64;
        for a in 0..n1 {
            for b in n1..n1 + n2 {
                let r = rg.r(a, b);
                tightest = tightest.max(r / bound);
                if !(r <= bound * (1.0 + FLOAT_SLACK)) {
                    treefact += 1;
                }
            }
        }
    }
    outcome(
        triangle == 0 && monotone == 0 && mismatch == 0 && treefact == 0,
        format!(
            "500 instances: {triangle} triangle, {monotone} monotonicity, {mismatch} oracle mismatches; \
             100 two-tree instances: {treefact} violations, max R/(2d+ℓ/k) {tightest:.3}"
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let wanted = |c: usize| selected.is_empty() || selected.contains(&c);
    let names = [
        "solver end-to-end",
        "AGD schedule",
        "τ validity",
        "decompose invariants",
        "partial path sparsification",
        "uniform sampling",
        "Richardson rate",
        "ultrasparsifier",
        "BSS potentials",
        "vertex-expansion paths",
        "effective-resistance facts",
    ];
    let mut bss_runs = Vec::new();
    let mut failed = 0;
    for (idx, name) in names.iter().enumerate() {
        let c = idx + 1;
        if !wanted(c) {
            continue;
        }
        let t = Instant::now();
        let out = match c {
            1 => solver_end_to_end(),
            2 => agd_schedule(),
            3 => tau_validity(),
            4 => decompose_invariants(),
            5 => partial_path_sparsification(),
            6 => uniform_sampling(),
            7 => richardson_rate(),
            8 => ultrasparsifier(&mut bss_runs),
            9 => bss_potentials(std::mem::take(&mut bss_runs)),
            10 => vertex_expansion_paths(),
            _ => resistance_facts(),
        };
        failed += usize::from(!out.pass);
        println!(
            "criterion {c:>2} {} {name}: {} [{:.1}s]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
