//! Jacobi-preconditioned conjugate gradient on a graph Laplacian.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::WeightedMultiGraph;
use crate::oracle::project_components;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// `‖b − L x‖ / ‖b‖` recomputed from scratch at exit.
    pub relative_residual: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Solves `L_G x = b` after projecting `b` off the kernel, stopping once the
/// relative residual falls to `tol` or after `max_iter` steps. The answer has
/// zero mean on every component.
pub fn conjugate_gradient(
    g: &WeightedMultiGraph,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, CgReport) {
    let n = g.n();
    let (labels, count) = g.components();
    let mut rhs = b.to_vec();
    project_components(&labels, count, &mut rhs);
    let bnorm = norm(&rhs);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return (
            x,
            CgReport {
                iterations: 0,
                relative_residual: 0.0,
            },
        );
    }
    let inv_diag: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < max_iter && norm(&r) > tol * bnorm {
        g.laplacian_apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
    project_components(&labels, count, &mut x);
    g.laplacian_apply(&x, &mut ap);
    let res: Vec<f64> = rhs.iter().zip(&ap).map(|(a, b)| a - b).collect();
    (
        x,
        CgReport {
            iterations,
            relative_residual: norm(&res) / bnorm,
        },
    )
}

/// Iteration cap used when callers do not pick one.
pub fn default_max_iter(n: usize) -> usize {
    20 * n + 1000
}
