//! Riemannian conjugate gradient over `m × r` isometries.
//!
//! Tangent vectors at `U` satisfy `U†Z + Z†U = 0`; the projection is
//! `Z − U sym(U†Z)`. Steps are retracted with the QR factor (Gram–Schmidt),
//! and directions are transported by re-projection.

use crate::linalg::{self, ComplexMatrix, C64};

use super::objective::{Objective, Shape};

pub(crate) struct Settings {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    /// Smallest objective magnitude the relative value test scales with.
    pub value_floor: f64,
}

pub(crate) struct Outcome {
    pub u: ComplexMatrix,
    /// Objective in the minimized orientation (negated for maximization).
    pub value: f64,
    pub converged: bool,
}

fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn project(u: &ComplexMatrix, z: &ComplexMatrix) -> ComplexMatrix {
    let uz = u.adjoint() * z;
    let sym = (&uz + uz.adjoint()) * C64::new(0.5, 0.0);
    z - u * sym
}

fn retract(u: &ComplexMatrix, dir: &ComplexMatrix, t: f64) -> Option<ComplexMatrix> {
    let mut next = u + dir * C64::new(t, 0.0);
    linalg::orthonormalize_columns(&mut next).then_some(next)
}

/// Minimize `sign · objective` starting from `u0`.
pub(crate) fn minimize(obj: &Objective, shape: Shape, sign: f64, u0: ComplexMatrix, cfg: &Settings) -> Outcome {
    const ARMIJO: f64 = 1e-4;
    const STALL_LIMIT: usize = 3;

    let eval = |u: &ComplexMatrix| sign * obj.value(u, shape);
    let eval_grad = |u: &ComplexMatrix, g: &mut ComplexMatrix| {
        let f = obj.value_grad(u, shape, g);
        *g *= C64::new(sign, 0.0);
        sign * f
    };

    let mut u = u0;
    let mut egrad = ComplexMatrix::zeros(u.nrows(), u.ncols());
    let mut f = eval_grad(&u, &mut egrad);
    let mut xi = project(&u, &egrad);
    let mut dir = -&xi;
    let mut step = {
        let n = xi.norm();
        if n > 0.0 { 0.1 / n } else { 1.0 }
    };
    let mut stalls = 0;
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let xi_sq = inner(&xi, &xi);
        if xi_sq.sqrt() <= 1e-14 * (1.0 + f.abs()) {
            converged = true;
            break;
        }
        let mut slope = inner(&xi, &dir);
        if !(slope < 0.0) {
            dir = -&xi;
            slope = -xi_sq;
        }

        // Backtracking Armijo search, expanding while the first trial succeeds.
        let mut t = step;
        let mut accepted: Option<(ComplexMatrix, f64, f64)> = None;
        for _ in 0..60 {
            if let Some(cand) = retract(&u, &dir, t) {
                let fc = eval(&cand);
                if fc <= f + ARMIJO * t * slope {
                    accepted = Some((cand, fc, t));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((mut cand, mut fc, mut t_ok)) = accepted else {
            if slope == -xi_sq {
                // Steepest descent cannot make progress: stationary to working precision.
                converged = true;
                break;
            }
            dir = -&xi;
            continue;
        };
        if t_ok == step {
            for _ in 0..8 {
                let t2 = 2.0 * t_ok;
                let Some(c2) = retract(&u, &dir, t2) else { break };
                let f2 = eval(&c2);
                if f2 < fc && f2 <= f + ARMIJO * t2 * slope {
                    cand = c2;
                    fc = f2;
                    t_ok = t2;
                } else {
                    break;
                }
            }
        }
        step = t_ok;

        let decrease = f - fc;
        let moved = t_ok * dir.norm();
        let mut gnew = ComplexMatrix::zeros(u.nrows(), u.ncols());
        let fnew = eval_grad(&cand, &mut gnew);
        let xi_new = project(&cand, &gnew);
        let xi_old = project(&cand, &xi);
        let dir_old = project(&cand, &dir);
        let beta = (inner(&xi_new, &(&xi_new - &xi_old)) / xi_sq).max(0.0);
        dir = -&xi_new + dir_old * C64::new(beta, 0.0);
        u = cand;
        f = fnew;
        xi = xi_new;

        if decrease <= cfg.value_tolerance * f.abs().max(cfg.value_floor) || moved <= cfg.step_tolerance {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                converged = true;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Outcome { u, value: f, converged }
}
