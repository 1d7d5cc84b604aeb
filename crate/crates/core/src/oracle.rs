//! Dense, deliberately simple linear algebra used to check the fast code.
//!
//! Everything here builds the full `n × n` Laplacian and diagonalizes it, so
//! it refuses inputs above a size cap.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::graph::WeightedMultiGraph;

pub type DenseMatrix = DMatrix<f64>;

pub const DEFAULT_CAP: usize = 500;
/// Eigenvalues below `PINV_CUTOFF · λ_max` are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-10;
/// Relative tolerance used by the PSD-ordering checks.
pub const SANDWICH_TOL: f64 = 1e-9;

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

pub fn laplacian_dense(g: &WeightedMultiGraph) -> DenseMatrix {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

/// Subtracts each component's mean from `b`.
pub fn project_components(labels: &[usize], count: usize, b: &mut [f64]) {
    let mut sum = vec![0.0; count];
    let mut size = vec![0usize; count];
    for (v, &c) in labels.iter().enumerate() {
        sum[c] += b[v];
        size[c] += 1;
    }
    for (v, &c) in labels.iter().enumerate() {
        b[v] -= sum[c] / size[c] as f64;
    }
}

/// Accepted `‖AV − VΛ‖_max / ‖A‖_max` for a decomposition.
const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

fn eigen_residual(a: &DenseMatrix, lam: &DVector<f64>, v: &DenseMatrix) -> f64 {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    (a * v - v * DMatrix::from_diagonal(lam)).amax() / scale
}

/// Cyclic Jacobi rotations. Slow but unconditionally convergent.
fn jacobi_eigen(a: &DenseMatrix) -> (DVector<f64>, DenseMatrix) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::identity(n, n);
    let norm = m.norm().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[(i, j)] * m[(i, j)];
                }
            }
        }
        if libm::sqrt(off) <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (m.diagonal(), v)
}

/// Symmetric eigendecomposition `A = V diag(λ) Vᵀ`.
///
/// nalgebra's implicit QR occasionally returns a decomposition that does not
/// reconstruct `A` (a few in ten thousand random Laplacians). Every result is
/// checked; failures are retried on `A + cI`, which has the same
/// eigenvectors, and finally handed to Jacobi.
pub fn symmetric_eigen(a: &DenseMatrix) -> SymmetricEigen<f64, Dyn> {
    let n = a.nrows();
    let scale = a.amax();
    for shift in [0.0, 1.0, 0.37, 2.9] {
        let shifted = a + DMatrix::identity(n, n) * (shift * scale);
        let e = SymmetricEigen::new(shifted);
        let eigenvalues = e.eigenvalues.map(|x| x - shift * scale);
        if eigen_residual(a, &eigenvalues, &e.eigenvectors) <= EIGEN_RESIDUAL_TOL {
            return SymmetricEigen {
                eigenvectors: e.eigenvectors,
                eigenvalues,
            };
        }
    }
    let (eigenvalues, eigenvectors) = jacobi_eigen(a);
    SymmetricEigen {
        eigenvectors,
        eigenvalues,
    }
}

/// [`symmetric_eigen`] as plain vectors.
pub fn sym_eigen(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let e = symmetric_eigen(a);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let mut lam = sym_eigen(a).0;
    lam.sort_by(f64::total_cmp);
    lam
}

pub fn min_eigenvalue(a: &DenseMatrix) -> f64 {
    sym_eigenvalues(a).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(a: &DenseMatrix) -> f64 {
    sym_eigenvalues(a).last().copied().unwrap_or(0.0)
}

/// Pseudoinverse of a symmetric PSD matrix with the relative cutoff above.
pub fn sym_pinv(a: &DenseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let (lam, v) = sym_eigen(a);
    let top = lam.iter().copied().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(n, n);
    for (k, &l) in lam.iter().enumerate() {
        if l > PINV_CUTOFF * top && l > 0.0 {
            let col = v.column(k);
            out += (col * col.transpose()) / l;
        }
    }
    out
}

/// Symmetric square root of the pseudoinverse, `A^{+1/2}`.
pub fn sym_pinv_sqrt(a: &DenseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let (lam, v) = sym_eigen(a);
    let top = lam.iter().copied().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(n, n);
    for (k, &l) in lam.iter().enumerate() {
        if l > PINV_CUTOFF * top && l > 0.0 {
            let col = v.column(k);
            out += (col * col.transpose()) / libm::sqrt(l);
        }
    }
    out
}

/// `L_G^+` together with the component structure of `G`.
#[derive(Clone, Debug)]
pub struct PseudoInverse {
    pinv: DenseMatrix,
    labels: Vec<usize>,
    count: usize,
}

impl PseudoInverse {
    pub fn new(g: &WeightedMultiGraph) -> Result<Self> {
        Self::with_cap(g, DEFAULT_CAP)
    }

    pub fn with_cap(g: &WeightedMultiGraph, cap: usize) -> Result<Self> {
        check_cap("resistance oracle", g.n(), cap)?;
        let (labels, count) = g.components();
        Ok(PseudoInverse {
            pinv: sym_pinv(&laplacian_dense(g)),
            labels,
            count,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.pinv
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut bp = b.to_vec();
        project_components(&self.labels, self.count, &mut bp);
        let x = &self.pinv * DVector::from_vec(bp);
        let mut x: Vec<f64> = x.iter().copied().collect();
        project_components(&self.labels, self.count, &mut x);
        x
    }

    /// `R_eff(u, v)`; `f64::INFINITY` when `u` and `v` are disconnected.
    pub fn resistance(&self, u: usize, v: usize) -> f64 {
        if self.labels[u] != self.labels[v] {
            return f64::INFINITY;
        }
        let p = &self.pinv;
        (p[(u, u)] + p[(v, v)] - 2.0 * p[(u, v)]).max(0.0)
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }
}

/// `L_G^+ b` with `b` first projected off every component's constant vector.
pub fn pinv_solve(g: &WeightedMultiGraph, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != g.n() {
        return Err(invalid("right-hand side length does not match n"));
    }
    Ok(PseudoInverse::new(g)?.solve(b))
}

pub fn effective_resistance(g: &WeightedMultiGraph, u: usize, v: usize) -> Result<f64> {
    if u >= g.n() || v >= g.n() {
        return Err(invalid("vertex outside graph"));
    }
    Ok(PseudoInverse::new(g)?.resistance(u, v))
}

/// Whether `c_lo·L_lo ⪯ L_mid ⪯ c_hi·L_hi`, each side decided by the smallest
/// eigenvalue of the difference against `SANDWICH_TOL` times the larger norm.
pub fn spectral_sandwich(
    lo: &WeightedMultiGraph,
    mid: &WeightedMultiGraph,
    hi: &WeightedMultiGraph,
    c_lo: f64,
    c_hi: f64,
) -> Result<bool> {
    let n = mid.n();
    if lo.n() != n || hi.n() != n {
        return Err(invalid("sandwich graphs must share a vertex set"));
    }
    check_cap("spectral sandwich", n, DEFAULT_CAP)?;
    let l_lo = laplacian_dense(lo) * c_lo;
    let l_mid = laplacian_dense(mid);
    let l_hi = laplacian_dense(hi) * c_hi;
    Ok(psd_le(&l_lo, &l_mid) && psd_le(&l_mid, &l_hi))
}

/// `A ⪯ B` up to the relative tolerance.
pub fn psd_le(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    let scale = max_eigenvalue(a)
        .abs()
        .max(max_eigenvalue(b).abs())
        .max(f64::MIN_POSITIVE);
    min_eigenvalue(&(b - a)) >= -SANDWICH_TOL * scale
}

/// Largest `λ` with `L_a x = λ L_b x` on the range of `L_b`. Infinite when
/// `L_a` has mass outside that range.
pub fn pencil_lambda_max(a: &WeightedMultiGraph, b: &WeightedMultiGraph) -> Result<f64> {
    check_cap("pencil eigenvalue", a.n(), DEFAULT_CAP)?;
    let la = laplacian_dense(a);
    let lb = laplacian_dense(b);
    if range_leak(&la, &lb) {
        return Ok(f64::INFINITY);
    }
    let s = sym_pinv_sqrt(&lb);
    Ok(max_eigenvalue(&(&s * la * &s)))
}

/// Smallest nonzero-range `λ` with `L_a x = λ L_b x` over the range of `L_b`.
pub fn pencil_lambda_min(a: &WeightedMultiGraph, b: &WeightedMultiGraph) -> Result<f64> {
    check_cap("pencil eigenvalue", a.n(), DEFAULT_CAP)?;
    let la = laplacian_dense(a);
    let lb = laplacian_dense(b);
    let (lam, v) = sym_eigen(&lb);
    let top = lam.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..lam.len())
        .filter(|&k| lam[k] > PINV_CUTOFF * top)
        .collect();
    if keep.is_empty() {
        return Ok(0.0);
    }
    let mut basis = DMatrix::zeros(a.n(), keep.len());
    for (j, &k) in keep.iter().enumerate() {
        basis.set_column(j, &(v.column(k) / libm::sqrt(lam[k])));
    }
    let m = basis.transpose() * la * basis;
    Ok(min_eigenvalue(&m))
}

fn range_leak(la: &DenseMatrix, lb: &DenseMatrix) -> bool {
    let (lam, v) = sym_eigen(lb);
    let top = lam
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let scale = max_eigenvalue(la).max(f64::MIN_POSITIVE);
    (0..lam.len())
        .filter(|&k| lam[k] <= PINV_CUTOFF * top)
        .any(|k| {
            let c = v.column(k);
            (c.transpose() * la * c)[(0, 0)] > 1e-8 * scale
        })
}

/// `(x − x*)ᵀ L_G (x − x*)`.
pub fn a_norm_error(g: &WeightedMultiGraph, x: &[f64], xstar: &[f64]) -> Result<f64> {
    if x.len() != g.n() || xstar.len() != g.n() {
        return Err(invalid("vector length does not match n"));
    }
    let d: Vec<f64> = x.iter().zip(xstar).map(|(a, b)| a - b).collect();
    Ok(g.quadratic_form(&d))
}
