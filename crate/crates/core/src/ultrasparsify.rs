//! Dense ultrasparsifiers built from rank-one pieces.
//!
//! Three stages. [`greedy_trace_removal`] drops vectors from a decomposition
//! `A = Σ vᵢvᵢᵀ` one at a time, always the one whose Sherman-Morrison update
//! raises `tr[B⁻¹A]` the least. [`bss_augment`] then adds a few weighted
//! vectors back under the upper and lower barrier potentials until the sum is
//! pinned between `qI` and `3I`. [`ultrasparsify`] runs both on the
//! normalized edge vectors of a graph.
//!
//! Every stage is `O(n³)` or worse per step and refuses inputs above
//! [`UltraConfig::dense_cap`] vertices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::config::UltraConfig;
use crate::error::{invalid, Error, Result};
use crate::graph::{Edge, WeightedMultiGraph};
use crate::oracle::{
    laplacian_dense, pencil_lambda_max, pencil_lambda_min, psd_le, spectral_sandwich,
    symmetric_eigen, DenseMatrix, PseudoInverse,
};
use crate::rng::Rng;

/// Relative slack on the per-step inequalities, which are otherwise exact.
const STEP_TOL: f64 = 1e-9;

fn numerical(msg: impl Into<alloc::string::String>) -> Error {
    Error::Numerical(msg.into())
}

fn spd_inverse(b: &DenseMatrix) -> Option<DenseMatrix> {
    Cholesky::new(b.clone()).map(|c| c.inverse())
}

fn gram(v: &DenseMatrix, cols: impl Iterator<Item = usize>) -> DenseMatrix {
    let n = v.nrows();
    let mut b = DMatrix::zeros(n, n);
    for i in cols {
        let c = v.column(i);
        b.ger(1.0, &c, &c, 1.0);
    }
    b
}

fn trace_of_product(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

/// Outcome of [`greedy_trace_removal`].
#[derive(Clone, Debug)]
pub struct TraceRemoval {
    /// Kept indices, ascending.
    pub selected: Vec<usize>,
    /// Removed indices in removal order.
    pub removed: Vec<usize>,
    /// `tr[B⁻¹A]` before the first removal and after each one.
    pub trajectory: Vec<f64>,
    /// `tr[B⁻¹A]` for the final selection from a fresh inverse.
    pub final_trace: f64,
    /// `m · k`.
    pub bound: f64,
    /// Removals whose trace growth broke `tr' ≤ tr·(s−n+1)/(s−n)`.
    pub step_violations: usize,
    /// Largest relative Frobenius gap seen between the maintained inverse and
    /// a fresh one.
    pub max_inverse_drift: f64,
    /// Candidate evaluations skipped because `1 − vᵀB⁻¹v` was at the guard.
    pub guarded_candidates: usize,
    pub refreshes: usize,
}

impl TraceRemoval {
    pub fn target_size(n: usize, k: f64) -> usize {
        n + libm::ceil(n as f64 / k) as usize
    }

    pub fn holds(&self) -> bool {
        self.step_violations == 0 && self.final_trace <= self.bound
    }
}

/// Greedily shrinks `S = [m]` to `n + ⌈n/k⌉` columns of `vectors` (an
/// `n × m` matrix), each step removing the column that raises `tr[B⁻¹A]`
/// least. Fails when the columns do not span `ℝⁿ`, when no column can be
/// removed without losing rank, when the maintained inverse drifts past the
/// tolerance, or when the final trace exceeds `m·k`.
pub fn greedy_trace_removal(
    vectors: &DenseMatrix,
    k: f64,
    cfg: &UltraConfig,
) -> Result<TraceRemoval> {
    let n = vectors.nrows();
    let m = vectors.ncols();
    if n > cfg.dense_cap {
        return Err(Error::CapExceeded {
            what: "greedy trace removal",
            n,
            cap: cfg.dense_cap,
        });
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(invalid("k must be a finite number at least 1"));
    }
    let a = gram(vectors, 0..m);
    let lam = symmetric_eigen(&a).eigenvalues;
    let top = lam.max();
    if n == 0 || !(lam.min() > cfg.rank_guard * top) {
        return Err(Error::Degenerate("vectors do not span the space".into()));
    }
    let target = TraceRemoval::target_size(n, k);
    let mut b = a.clone();
    let mut b_inv = spd_inverse(&b).ok_or_else(|| numerical("A is not positive definite"))?;
    let mut alive = vec![true; m];
    let mut size = m;

    // y_i = B⁻¹v_i, lev_i = v_iᵀB⁻¹v_i, num_i = y_iᵀ A y_i
    let mut y = &b_inv * vectors;
    let mut lev = vec![0.0; m];
    let mut num = vec![0.0; m];
    let rescore = |y: &DenseMatrix, lev: &mut [f64], num: &mut [f64]| {
        let ay = &a * y;
        for i in 0..m {
            lev[i] = vectors.column(i).dot(&y.column(i));
            num[i] = y.column(i).dot(&ay.column(i));
        }
    };
    rescore(&y, &mut lev, &mut num);

    let mut trace = trace_of_product(&b_inv, &a);
    let mut out = TraceRemoval {
        selected: Vec::new(),
        removed: Vec::new(),
        trajectory: vec![trace],
        final_trace: trace,
        bound: m as f64 * k,
        step_violations: 0,
        max_inverse_drift: 0.0,
        guarded_candidates: 0,
        refreshes: 0,
    };

    while size > target {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..m).filter(|&i| alive[i]) {
            let slack = 1.0 - lev[i];
            if !(slack > cfg.rank_guard) {
                out.guarded_candidates += 1;
                continue;
            }
            let inc = num[i] / slack;
            if best.is_none_or(|(_, b)| inc < b) {
                best = Some((i, inc));
            }
        }
        let (j, inc) =
            best.ok_or_else(|| numerical("every remaining vector is needed for full rank"))?;
        let d = 1.0 - lev[j];
        let allowed = trace * (size - n + 1) as f64 / (size - n) as f64;
        let next = trace + inc;
        if next > allowed * (1.0 + STEP_TOL) {
            out.step_violations += 1;
        }

        let yj: DVector<f64> = y.column(j).into_owned();
        let vj = vectors.column(j);
        b.ger(-1.0, &vj, &vj, 1.0);
        b_inv.ger(1.0 / d, &yj, &yj, 1.0);
        let z = &a * &yj;
        let ajj = yj.dot(&z);
        alive[j] = false;
        for i in (0..m).filter(|&i| alive[i]) {
            let g = yj.dot(&vectors.column(i));
            let c = g / d;
            lev[i] += c * g;
            num[i] += 2.0 * c * y.column(i).dot(&z) + c * c * ajj;
            y.column_mut(i).axpy(c, &yj, 1.0);
        }
        size -= 1;
        trace = next;
        out.removed.push(j);
        out.trajectory.push(trace);

        let steps = out.removed.len();
        let refresh = steps.is_multiple_of(cfg.refresh_every.max(1));
        if cfg.check_every_step || refresh {
            let fresh = spd_inverse(&b).ok_or_else(|| numerical("B lost positive definiteness"))?;
            let drift = (&b_inv - &fresh).norm() / fresh.norm();
            out.max_inverse_drift = out.max_inverse_drift.max(drift);
            if !(drift <= cfg.consistency_tol) {
                return Err(numerical(format!(
                    "maintained inverse drifted by {drift:.3e} after {steps} removals"
                )));
            }
            if refresh {
                b = gram(vectors, (0..m).filter(|&i| alive[i]));
                b_inv = spd_inverse(&b).ok_or_else(|| numerical("B lost positive definiteness"))?;
                y = &b_inv * vectors;
                rescore(&y, &mut lev, &mut num);
                out.refreshes += 1;
            }
        }
    }

    out.selected = (0..m).filter(|&i| alive[i]).collect();
    let b = gram(vectors, out.selected.iter().copied());
    let fresh = spd_inverse(&b).ok_or_else(|| numerical("final B is singular"))?;
    out.final_trace = trace_of_product(&fresh, &a);
    if !(out.final_trace <= out.bound) {
        return Err(numerical(format!(
            "final trace {} exceeds m·k = {}",
            out.final_trace, out.bound
        )));
    }
    Ok(out)
}

/// Barrier positions and potentials after one augmentation step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierSnapshot {
    pub step: usize,
    pub u: f64,
    pub l: f64,
    /// `tr[(uI − M)⁻¹]`.
    pub phi_upper: f64,
    /// `tr[(M − lI)⁻¹]`.
    pub phi_lower: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl BarrierSnapshot {
    fn of(step: usize, u: f64, l: f64, m: &DenseMatrix) -> Self {
        let lam = symmetric_eigen(m).eigenvalues;
        BarrierSnapshot {
            step,
            u,
            l,
            phi_upper: lam.iter().map(|&x| 1.0 / (u - x)).sum(),
            phi_lower: lam.iter().map(|&x| 1.0 / (x - l)).sum(),
            lambda_min: lam.min(),
            lambda_max: lam.max(),
        }
    }

    fn within(&self, gamma_upper: f64, gamma_lower: f64) -> bool {
        self.lambda_min > self.l
            && self.lambda_max < self.u
            && self.phi_upper <= gamma_upper * (1.0 + STEP_TOL)
            && self.phi_lower <= gamma_lower * (1.0 + STEP_TOL)
    }
}

/// Outcome of [`bss_augment`].
#[derive(Clone, Debug)]
pub struct BssAugment {
    /// `(column, weight)` in the order added. A column may repeat.
    pub additions: Vec<(usize, f64)>,
    /// One snapshot for the starting matrix and one per step.
    pub snapshots: Vec<BarrierSnapshot>,
    /// `tr[A⁻¹]`.
    pub kappa: f64,
    pub q: f64,
    pub gamma_upper: f64,
    pub gamma_lower: f64,
    pub delta_upper: f64,
    pub delta_lower: f64,
    /// Snapshots outside their barriers or above their potential bounds.
    pub violations: usize,
    pub result: DenseMatrix,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl BssAugment {
    pub fn steps(&self) -> usize {
        self.additions.len()
    }
}

/// Root of a monotone function on `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs, to relative width `tol`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let rising = f(hi) > f(lo);
    while hi - lo > tol * hi.abs().max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adds `s = ⌈(κ + 2n)q⌉` weighted columns of `vectors` to `A` so that
/// `qI ⪯ A + Σ wᵢvᵢvᵢᵀ ⪯ 3I`. The columns must satisfy `Σ vᵢvᵢᵀ = I` and
/// `A` must satisfy `0 ≺ A ⪯ I`; `κ = tr[A⁻¹]`.
pub fn bss_augment(
    a: &DenseMatrix,
    vectors: &DenseMatrix,
    q: f64,
    cfg: &UltraConfig,
) -> Result<BssAugment> {
    let n = a.nrows();
    if a.ncols() != n || vectors.nrows() != n {
        return Err(invalid("A must be square and match the vector dimension"));
    }
    if n > cfg.dense_cap {
        return Err(Error::CapExceeded {
            what: "barrier augmentation",
            n,
            cap: cfg.dense_cap,
        });
    }
    if !(q >= 0.0) || !q.is_finite() {
        return Err(invalid("q must be a finite nonnegative number"));
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let m_all = gram(vectors, 0..vectors.ncols());
    if !((&m_all - &identity).norm() <= 1e-8 * libm::sqrt(n as f64).max(1.0)) {
        return Err(invalid("vectors must satisfy Σ vvᵀ = I"));
    }
    let lam = symmetric_eigen(a).eigenvalues;
    if n == 0 || !(lam.min() > 0.0) || !(lam.max() <= 1.0 + STEP_TOL) {
        return Err(invalid("A must satisfy 0 ≺ A ⪯ I"));
    }
    let kappa: f64 = lam.iter().map(|&x| 1.0 / x).sum();
    let s = libm::ceil((kappa + 2.0 * n as f64) * q) as usize;
    if s > n {
        return Err(invalid(format!("⌈(κ + 2n)q⌉ = {s} exceeds n = {n}")));
    }
    let gamma_upper = n as f64;
    let gamma_lower = kappa;
    let delta_upper = 1.0 / n as f64;
    let delta_lower = 1.0 / (2.0 * n as f64 + kappa);

    let mut mat = a.clone();
    let (mut u, mut l) = (2.0, 0.0);
    let mut first = BarrierSnapshot::of(0, u, l, &mat);
    // at l = 0 the lower potential is κ itself, so reuse it
    first.phi_lower = kappa;
    let mut out = BssAugment {
        additions: Vec::with_capacity(s),
        snapshots: vec![first],
        kappa,
        q,
        gamma_upper,
        gamma_lower,
        delta_upper,
        delta_lower,
        violations: usize::from(!first.within(gamma_upper, gamma_lower)),
        result: DMatrix::zeros(0, 0),
        lambda_min: 0.0,
        lambda_max: 0.0,
    };

    for step in 1..=s {
        let (un, ln) = (u + delta_upper, l + delta_lower);
        let eig = symmetric_eigen(&mat);
        let ev = &eig.eigenvalues;
        if !(ev.min() > ln) || !(ev.max() < un) {
            return Err(numerical(format!(
                "barriers crossed the spectrum at step {step}"
            )));
        }
        let phi_u: f64 = ev.iter().map(|&x| 1.0 / (un - x)).sum();
        let phi_l: f64 = ev.iter().map(|&x| 1.0 / (x - ln)).sum();
        let room_u = gamma_upper - phi_u;
        let excess_l = phi_l - gamma_lower;
        if !(room_u > 0.0) {
            return Err(numerical(format!(
                "upper potential has no room at step {step}"
            )));
        }
        let coords = eig.eigenvectors.transpose() * vectors;

        // t must lie in [1/L_A(v), 1/U_A(v)]; keep the column whose interval is
        // relatively widest
        let mut best: Option<(usize, f64, [f64; 4])> = None;
        for i in 0..vectors.ncols() {
            let (mut u1, mut u2, mut l1, mut l2) = (0.0, 0.0, 0.0, 0.0);
            for (r, &x) in ev.iter().enumerate() {
                let w2 = coords[(r, i)] * coords[(r, i)];
                let a = 1.0 / (un - x);
                let b = 1.0 / (x - ln);
                u1 += w2 * a;
                u2 += w2 * a * a;
                l1 += w2 * b;
                l2 += w2 * b * b;
            }
            if !(u1 > 0.0) {
                continue;
            }
            let upper_a = u1 + u2 / room_u;
            let ratio = if excess_l <= 0.0 {
                0.0
            } else {
                let lower_a = l2 / excess_l - l1;
                if !(lower_a > 0.0) {
                    continue;
                }
                upper_a / lower_a
            };
            if ratio < 1.0 && best.is_none_or(|(_, r, _)| ratio < r) {
                best = Some((i, ratio, [u1, u2, l1, l2]));
            }
        }
        let (i, _, [u1, u2, l1, l2]) =
            best.ok_or_else(|| numerical(format!("no feasible column at step {step}")))?;

        // Sherman-Morrison turns both potentials into scalar functions of t
        let f_upper = |t: f64| phi_u + t * u2 / (1.0 - t * u1) - gamma_upper;
        let f_lower = |t: f64| phi_l - t * l2 / (1.0 + t * l1) - gamma_lower;
        let t_hi = bisect(f_upper, 0.0, 1.0 / u1, cfg.bisection_tol);
        let t_lo = if excess_l <= 0.0 {
            0.0
        } else {
            let mut cap = t_hi;
            while f_lower(cap) > 0.0 {
                cap *= 2.0;
            }
            bisect(f_lower, 0.0, cap, cfg.bisection_tol)
        };
        if !(t_lo < t_hi) {
            return Err(numerical(format!("empty step interval at step {step}")));
        }
        let t = 0.5 * (t_lo + t_hi);
        let v = vectors.column(i);
        mat.ger(t, &v, &v, 1.0);
        u = un;
        l = ln;
        out.additions.push((i, t));
        let snap = BarrierSnapshot::of(step, u, l, &mat);
        if !snap.within(gamma_upper, gamma_lower) {
            out.violations += 1;
        }
        out.snapshots.push(snap);
    }

    let lam = symmetric_eigen(&mat).eigenvalues;
    out.lambda_min = lam.min();
    out.lambda_max = lam.max();
    out.result = mat;
    if !(out.lambda_min >= q * (1.0 - STEP_TOL)) || !(out.lambda_max <= 3.0 * (1.0 + STEP_TOL)) {
        return Err(numerical(format!(
            "final spectrum [{}, {}] escapes [q, 3] with q = {q}",
            out.lambda_min, out.lambda_max
        )));
    }
    Ok(out)
}

/// The sampled graph standing in for `G` when `G` has too many edges.
#[derive(Clone, Debug)]
pub struct Presparsified {
    /// Edge ids of `G` with their new weights.
    pub edges: Vec<(usize, f64)>,
    /// `b` in `L_G ⪯ L_G' ⪯ b·L_G`, measured.
    pub factor: f64,
    pub attempts: usize,
}

/// Samples `budget` edges by leverage score. Whole expected counts are taken
/// deterministically and the fractional remainders by systematic sampling,
/// then the result is rescaled so that `L_G ⪯ L_G'`.
fn presparsify(
    g: &WeightedMultiGraph,
    live: &[usize],
    budget: usize,
    attempts: usize,
    rng: &mut Rng,
) -> Result<Presparsified> {
    let pinv = PseudoInverse::new(g)?;
    let lev: Vec<f64> = live
        .iter()
        .map(|&id| {
            let e = g.edge(id);
            e.w * pinv.resistance(e.u, e.v)
        })
        .collect();
    let total: f64 = lev.iter().sum();
    let expect: Vec<f64> = lev.iter().map(|&x| budget as f64 * x / total).collect();

    let mut best: Option<Presparsified> = None;
    for _ in 0..attempts.max(1) {
        let mut count: Vec<usize> = expect.iter().map(|&c| libm::floor(c) as usize).collect();
        let mut order: Vec<usize> = (0..live.len()).collect();
        order.shuffle(rng);
        let mut mark = rng.gen::<f64>();
        let mut acc = 0.0;
        for &j in &order {
            acc += expect[j] - libm::floor(expect[j]);
            if acc > mark {
                count[j] += 1;
                mark += 1.0;
            }
        }
        let edges: Vec<(usize, f64)> = (0..live.len())
            .filter(|&j| count[j] > 0)
            .map(|j| (live[j], g.edge(live[j]).w * count[j] as f64 / expect[j]))
            .collect();
        let sampled = reweighted(g, &edges, 1.0);
        let lo = pencil_lambda_min(&sampled, g)?;
        let hi = pencil_lambda_max(&sampled, g)?;
        if !(lo > 0.0) {
            continue;
        }
        let factor = hi / lo;
        if best.as_ref().is_none_or(|b| factor < b.factor) {
            let edges = edges.into_iter().map(|(id, w)| (id, w / lo)).collect();
            best = Some(Presparsified {
                edges,
                factor,
                attempts: 0,
            });
        }
    }
    let mut out =
        best.ok_or_else(|| Error::Degenerate("leverage sampling never kept G connected".into()))?;
    out.attempts = attempts.max(1);
    Ok(out)
}

fn reweighted(g: &WeightedMultiGraph, edges: &[(usize, f64)], scale: f64) -> WeightedMultiGraph {
    let list = edges
        .iter()
        .map(|&(id, w)| {
            let e = g.edge(id);
            Edge {
                u: e.u,
                v: e.v,
                w: w * scale,
            }
        })
        .collect();
    WeightedMultiGraph::from_valid_edges(g.n(), list)
}

/// A reweighted subgraph `H` with `L_H ⪯ L_G ⪯ 54·b·k²·L_H`, where `b ≥ 1` is
/// the measured presparsification factor (1 when no presparsification ran).
#[derive(Clone, Debug)]
pub struct Ultrasparsifier {
    pub h: WeightedMultiGraph,
    /// For each edge of `h`, the id of the edge of `G` it reweights.
    pub edge_ids: Vec<usize>,
    pub k: f64,
    /// The factor `108k²` that the construction guarantees when `b ≤ 2`.
    pub guaranteed_factor: f64,
    pub presparsified: Option<Presparsified>,
    pub removal: TraceRemoval,
    pub augment: BssAugment,
    /// `n + 2n/k`.
    pub edge_bound: f64,
    /// `H` is the augmented graph times this, `1/(3b)`.
    pub scale: f64,
    /// `(1/18k²)·L_G' ⪯ L_H' ⪯ 3·L_G'` for the unscaled output `H'`.
    pub intermediate_sandwich: bool,
    /// `L_H ⪯ L_G` by a dense eigenvalue check.
    pub dominated: bool,
    /// Extreme generalized eigenvalues of `(L_G, L_H)`.
    pub pencil_max: f64,
    pub pencil_min: f64,
}

impl Ultrasparsifier {
    pub fn within_edge_bound(&self) -> bool {
        self.h.m() as f64 <= self.edge_bound
    }

    /// `λ_max(L_G, L_H) / λ_min(L_G, L_H)`.
    pub fn condition_number(&self) -> f64 {
        self.pencil_max / self.pencil_min
    }
}

/// Builds an ultrasparsifier of a connected graph with at most `n + 2n/k`
/// edges. Self-loops are ignored.
pub fn ultrasparsify(
    g: &WeightedMultiGraph,
    k: f64,
    cfg: &UltraConfig,
    rng: &mut Rng,
) -> Result<Ultrasparsifier> {
    let n = g.n();
    if n > cfg.dense_cap {
        return Err(Error::CapExceeded {
            what: "ultrasparsify",
            n,
            cap: cfg.dense_cap,
        });
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(invalid("k must be a finite number at least 1"));
    }
    if n < 2 {
        return Err(Error::Degenerate(
            "ultrasparsify needs at least two vertices".into(),
        ));
    }
    if !g.is_connected() {
        return Err(Error::Degenerate(
            "ultrasparsify needs a connected graph".into(),
        ));
    }
    let live: Vec<usize> = (0..g.m()).filter(|&id| !g.edge(id).is_loop()).collect();
    let budget = libm::floor(cfg.presparsify_factor * n as f64) as usize;
    let presparsified = if live.len() > budget {
        Some(presparsify(
            g,
            &live,
            budget,
            cfg.presparsify_attempts,
            rng,
        )?)
    } else {
        None
    };
    let base: Vec<(usize, f64)> = match &presparsified {
        Some(p) => p.edges.clone(),
        None => live.iter().map(|&id| (id, g.edge(id).w)).collect(),
    };
    let factor = presparsified.as_ref().map_or(1.0, |p| p.factor);
    let g_base = reweighted(g, &base, 1.0);

    // v_e = M^{-1/2} b_e √w_e and one extra column M^{-1/2} 1
    let ones = DMatrix::from_element(n, n, 1.0);
    let mmat = laplacian_dense(&g_base) + ones;
    let eig = symmetric_eigen(&mmat);
    if !(eig.eigenvalues.min() > 0.0) {
        return Err(numerical("L + 11ᵀ is not positive definite"));
    }
    let inv_sqrt_diag =
        DVector::from_iterator(n, eig.eigenvalues.iter().map(|&x| 1.0 / libm::sqrt(x)));
    let q_mat = &eig.eigenvectors;
    let m_inv_sqrt = q_mat * DMatrix::from_diagonal(&inv_sqrt_diag) * q_mat.transpose();
    let cols = base.len() + 1;
    let mut vectors = DMatrix::zeros(n, cols);
    for (c, &(id, w)) in base.iter().enumerate() {
        let e = g.edge(id);
        let s = libm::sqrt(w);
        let col = (m_inv_sqrt.column(e.u) - m_inv_sqrt.column(e.v)) * s;
        vectors.set_column(c, &col);
    }
    let ones_col = cols - 1;
    vectors.set_column(ones_col, &m_inv_sqrt.column_sum());

    let removal = greedy_trace_removal(&vectors, k, cfg)?;
    if removal.step_violations > 0 {
        return Err(numerical(format!(
            "{} removals broke the per-step trace bound",
            removal.step_violations
        )));
    }
    let a = gram(&vectors, removal.selected.iter().copied());
    let q = 1.0 / (18.0 * k * k);
    let augment = bss_augment(&a, &vectors, q, cfg)?;
    if augment.violations > 0 {
        return Err(numerical(format!(
            "{} barrier steps broke the potential bounds",
            augment.violations
        )));
    }

    let mut coef = vec![0.0; cols];
    for &i in &removal.selected {
        coef[i] += 1.0;
    }
    for &(i, t) in &augment.additions {
        coef[i] += t;
    }
    let kept: Vec<(usize, f64)> = (0..base.len())
        .filter(|&c| coef[c] > 0.0)
        .map(|c| (base[c].0, base[c].1 * coef[c]))
        .collect();
    let h_aug = reweighted(g, &kept, 1.0);
    let intermediate_sandwich = spectral_sandwich(&g_base, &h_aug, &g_base, q, 3.0)?;
    if !intermediate_sandwich {
        return Err(numerical(
            "augmented graph escapes (1/18k²)·L_G' ⪯ L_H' ⪯ 3·L_G'",
        ));
    }

    let scale = 1.0 / (3.0 * factor);
    let h = reweighted(g, &kept, scale);
    let dominated = psd_le(&laplacian_dense(&h), &laplacian_dense(g));
    let pencil_max = pencil_lambda_max(g, &h)?;
    let pencil_min = pencil_lambda_min(g, &h)?;
    Ok(Ultrasparsifier {
        edge_ids: kept.iter().map(|&(id, _)| id).collect(),
        h,
        k,
        guaranteed_factor: 108.0 * k * k,
        presparsified,
        removal,
        augment,
        edge_bound: n as f64 + 2.0 * n as f64 / k,
        scale,
        intermediate_sandwich,
        dominated,
        pencil_max,
        pencil_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::rng::seeded;

    fn gaussian(n: usize, m: usize, rng: &mut Rng) -> DenseMatrix {
        // Box-Muller keeps this free of extra dependencies
        DMatrix::from_fn(n, m, |_, _| {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
        })
    }

    fn normalize(v: &DenseMatrix) -> DenseMatrix {
        let a = gram(v, 0..v.ncols());
        let eig = symmetric_eigen(&a);
        let d = DVector::from_iterator(
            v.nrows(),
            eig.eigenvalues.iter().map(|&x| 1.0 / libm::sqrt(x)),
        );
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose() * v
    }

    #[test]
    fn nothing_to_remove() {
        let mut rng = seeded(1);
        let v = gaussian(6, 9, &mut rng);
        let r = greedy_trace_removal(&v, 2.0, &UltraConfig::default()).unwrap();
        assert_eq!(r.selected, (0..9).collect::<Vec<_>>());
        assert!(r.removed.is_empty());
        assert!((r.final_trace - 6.0).abs() < 1e-9);
    }

    #[test]
    fn duplicated_basis() {
        let n = 5;
        let v = DMatrix::from_fn(n, 2 * n, |r, c| if c % n == r { 1.0 } else { 0.0 });
        let r = greedy_trace_removal(&v, 1.0, &UltraConfig::default()).unwrap();
        assert_eq!(r.selected.len(), 2 * n);
        assert!((r.final_trace - n as f64).abs() < 1e-12);
        // three copies each, two kept per direction on average
        let v = DMatrix::from_fn(n, 3 * n, |r, c| if c % n == r { 1.0 } else { 0.0 });
        let r = greedy_trace_removal(&v, 1.0, &UltraConfig::default()).unwrap();
        assert_eq!(r.selected.len(), 2 * n);
        assert!((r.final_trace - 1.5 * n as f64).abs() < 1e-9);
        for d in 0..n {
            assert!(r.selected.iter().any(|&c| c % n == d));
        }
    }

    #[test]
    fn gaussian_rows_trace_bound() {
        let mut rng = seeded(2);
        let v = gaussian(20, 80, &mut rng);
        let cfg = UltraConfig {
            refresh_every: 7,
            ..Default::default()
        };
        let r = greedy_trace_removal(&v, 2.0, &cfg).unwrap();
        assert_eq!(r.selected.len(), 30);
        assert_eq!(r.step_violations, 0);
        let a = gram(&v, 0..80);
        let b = gram(&v, r.selected.iter().copied());
        let dense = trace_of_product(&b.try_inverse().unwrap(), &a);
        assert!((dense - r.final_trace).abs() < 1e-8 * dense);
        assert!((r.trajectory.last().unwrap() - dense).abs() < 1e-6 * dense);
        assert!(dense <= 160.0);
        assert!(r.max_inverse_drift <= 1e-8);
        for w in r.trajectory.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn rejects_rank_deficient_input() {
        let v = DMatrix::from_fn(3, 5, |r, _| if r == 2 { 0.0 } else { 1.0 });
        assert!(matches!(
            greedy_trace_removal(&v, 1.0, &UltraConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bss_with_zero_steps() {
        let mut rng = seeded(3);
        let v = normalize(&gaussian(6, 20, &mut rng));
        let a = gram(&v, 0..10);
        let r = bss_augment(&a, &v, 0.0, &UltraConfig::default()).unwrap();
        assert_eq!(r.steps(), 0);
        assert!(r.lambda_max <= 1.0 + 1e-9);
        assert!(r.snapshots[0].phi_upper <= 6.0);
    }

    #[test]
    fn bss_small_instance() {
        let mut rng = seeded(4);
        let v = normalize(&gaussian(6, 30, &mut rng));
        let r0 = greedy_trace_removal(&v, 2.0, &UltraConfig::default()).unwrap();
        let a = gram(&v, r0.selected.iter().copied());
        let q = 1.0 / 72.0;
        let r = bss_augment(&a, &v, q, &UltraConfig::default()).unwrap();
        assert_eq!(r.steps(), libm::ceil((r.kappa + 12.0) * q) as usize);
        assert_eq!(r.violations, 0);
        assert_eq!(r.snapshots.len(), r.steps() + 1);
        assert!(r.snapshots[0].phi_upper <= 6.0 + 1e-12);
        let lam = symmetric_eigen(&r.result).eigenvalues;
        assert!(lam.min() >= q && lam.max() <= 3.0);
    }

    #[test]
    fn bss_rejects_unnormalized() {
        let mut rng = seeded(5);
        let v = gaussian(4, 10, &mut rng);
        let a = DMatrix::identity(4, 4) * 0.5;
        assert!(bss_augment(&a, &v, 0.1, &UltraConfig::default()).is_err());
    }

    #[test]
    fn tree_is_kept_whole() {
        let mut rng = seeded(6);
        let g = generators::random_weighted(25, 24, 0.5, 3.0, &mut rng);
        for k in [1.0, 2.0, 5.0] {
            let out = ultrasparsify(&g, k, &UltraConfig::default(), &mut rng).unwrap();
            let mut ids = out.edge_ids.clone();
            ids.sort_unstable();
            assert_eq!(ids, (0..24).collect::<Vec<_>>());
            assert!(out.dominated);
        }
    }

    #[test]
    fn complete_graph_k4() {
        let g = generators::complete(20);
        let mut rng = seeded(7);
        let out = ultrasparsify(&g, 4.0, &UltraConfig::default(), &mut rng).unwrap();
        assert!(out.presparsified.is_none());
        assert!(out.h.m() <= 30);
        assert!(out.intermediate_sandwich && out.dominated);
        assert!(out.pencil_max <= 18.0 * 16.0 * 3.0 + 1e-9);
    }

    #[test]
    fn weighted_random_graph() {
        let mut rng = seeded(8);
        let g = generators::random_weighted(40, 300, 1.0, 10.0, &mut rng);
        let out = ultrasparsify(&g, 3.0, &UltraConfig::default(), &mut rng).unwrap();
        assert!(out.within_edge_bound());
        assert!(out.dominated);
        assert!(out.pencil_max <= 108.0 * 9.0);
        assert!(out.removal.final_trace <= out.removal.bound);
    }

    #[test]
    fn dense_graph_is_presparsified() {
        let mut rng = seeded(9);
        let g = generators::complete(40);
        let out = ultrasparsify(&g, 2.0, &UltraConfig::default(), &mut rng).unwrap();
        let p = out.presparsified.as_ref().unwrap();
        assert!(p.edges.len() <= 640);
        assert!(out.dominated && out.within_edge_bound());
        assert!(out.pencil_max <= 54.0 * p.factor * 4.0 * (1.0 + 1e-9));
    }

    #[test]
    fn rejects_disconnected() {
        let g = WeightedMultiGraph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert!(ultrasparsify(&g, 2.0, &UltraConfig::default(), &mut seeded(1)).is_err());
    }
}
