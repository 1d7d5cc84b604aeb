//! Accelerated gradient descent preconditioned by a randomized solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgdSchedule {
    pub kappa: f64,
    /// Mixing weight of `x_t` in `y_t`.
    pub alpha: f64,
    /// Step length of the `v` sequence.
    pub eta: f64,
    /// Momentum of the `v` sequence.
    pub beta: f64,
    pub iterations: usize,
}

impl AgdSchedule {
    pub fn new(kappa: f64, eps: f64) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(invalid(format!("κ = {kappa} must be at least 1")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("ε = {eps} outside (0,1)")));
        }
        let sk = libm::sqrt(kappa);
        Ok(AgdSchedule {
            kappa,
            alpha: 2.0 * sk / (1.0 + 2.0 * sk),
            eta: 2.0 * kappa,
            beta: 1.0 - 1.0 / (2.0 * sk),
            iterations: (libm::ceil(4.0 * sk * libm::log(2.0 / eps)) as usize).max(1),
        })
    }
}

/// Runs the schedule for `A x = b` with `solve_b` approximating `B⁻¹` where
/// `A ⪯ B ⪯ κA`. `apply_a(x, out)` writes `A x`.
pub fn precon_noisy_agd(
    apply_a: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    eps: f64,
    solve_b: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    kappa: f64,
) -> Result<Vec<f64>> {
    precon_noisy_agd_observed(apply_a, b, eps, solve_b, kappa, &mut |_, _, _| {})
}

/// Receives `(t, x_t, v_t)`.
pub type Observer<'a> = dyn FnMut(usize, &[f64], &[f64]) + 'a;

/// As [`precon_noisy_agd`], calling `observe(t, x_t, v_t)` after every step.
pub fn precon_noisy_agd_observed(
    apply_a: &mut dyn FnMut(&[f64], &mut [f64]),
    b: &[f64],
    eps: f64,
    solve_b: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    kappa: f64,
    observe: &mut Observer<'_>,
) -> Result<Vec<f64>> {
    let s = AgdSchedule::new(kappa, eps)?;
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut ay = vec![0.0; n];
    for t in 0..s.iterations {
        for i in 0..n {
            y[i] = s.alpha * x[i] + (1.0 - s.alpha) * v[i];
        }
        apply_a(&y, &mut ay);
        for i in 0..n {
            ay[i] -= b[i];
        }
        let g = solve_b(&ay)?;
        if g.len() != n {
            return Err(invalid(
                "preconditioner returned a vector of the wrong length",
            ));
        }
        for i in 0..n {
            x[i] = y[i] - g[i];
            v[i] = s.beta * v[i] + (1.0 - s.beta) * (y[i] - s.eta * g[i]);
        }
        observe(t + 1, &x, &v);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle::PseudoInverse;

    #[test]
    fn schedule_for_kappa_four() {
        let s = AgdSchedule::new(4.0, 1e-6).unwrap();
        assert!((s.alpha - 0.8).abs() < 1e-15);
        assert_eq!(s.eta, 8.0);
        assert_eq!(s.beta, 0.75);
        assert_eq!(s.iterations, libm::ceil(8.0 * libm::log(2e6)) as usize);
        assert!(AgdSchedule::new(0.5, 1e-6).is_err());
    }

    #[test]
    fn exact_preconditioner_with_kappa_one() {
        let g = generators::grid(5, 5);
        let pinv = PseudoInverse::new(&g).unwrap();
        let mut b: Vec<f64> = (0..25).map(|i| (i % 7) as f64).collect();
        let mean = b.iter().sum::<f64>() / 25.0;
        b.iter_mut().for_each(|x| *x -= mean);
        let xstar = pinv.solve(&b);
        let mut first = None;
        let x = precon_noisy_agd_observed(
            &mut |x, out| g.laplacian_apply(x, out),
            &b,
            0.5,
            &mut |r| Ok(pinv.solve(r)),
            1.0,
            &mut |t, x, _| {
                if t == 1 {
                    first = Some(x.to_vec());
                }
            },
        )
        .unwrap();
        let x1 = first.unwrap();
        for i in 0..25 {
            assert!((x1[i] - xstar[i]).abs() < 1e-10);
            assert!((x[i] - xstar[i]).abs() < 1e-10);
        }
    }
}
