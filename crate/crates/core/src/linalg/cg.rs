use std::time::Instant;

use super::{dot, norm, relative_residual, LinearOperator, SolveReport, SolverConfig};
use crate::error::{Error, Result};

/// Conjugate gradients for symmetric positive semi-definite systems.
///
/// Iterates stay in `x0 + K(A, r0)`, so components of `x0` along the kernel
/// are preserved when `b` is consistent.
pub fn cg<A: LinearOperator + ?Sized>(a: &A, b: &[f64], x0: &[f64], cfg: &SolverConfig) -> (Vec<f64>, SolveReport) {
    cg_monitored(a, b, x0, cfg, |_, _| {})
}

/// As [`cg`], first rejecting `b` if it has a component along any of the
/// supplied kernel vectors.
pub fn cg_checked<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
    kernel: &[Vec<f64>],
) -> Result<(Vec<f64>, SolveReport)> {
    check_consistency(b, kernel)?;
    Ok(cg(a, b, x0, cfg))
}

/// Rejects `b` if its relative component along any kernel vector exceeds 1e-8.
pub fn check_consistency(b: &[f64], kernel: &[Vec<f64>]) -> Result<()> {
    let nb = norm(b);
    if nb > 0.0 {
        for k in kernel {
            let rel = dot(k, b).abs() / (norm(k) * nb);
            if rel > 1e-8 {
                return Err(Error::Inconsistent(rel));
            }
        }
    }
    Ok(())
}

/// As [`cg`], calling `monitor(k, x_k)` on the initial guess and after every
/// iteration.
pub fn cg_monitored<A, M>(a: &A, b: &[f64], x0: &[f64], cfg: &SolverConfig, mut monitor: M) -> (Vec<f64>, SolveReport)
where
    A: LinearOperator + ?Sized,
    M: FnMut(usize, &[f64]),
{
    let start = Instant::now();
    let n = b.len();
    let max_iter = cfg.max_iter_for(n);
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    a.apply(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let nb = norm(b);
    let scale = if nb > 0.0 { nb } else { 1.0 };
    let target = cfg.tolerance * scale;
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut it = 0;
    monitor(0, &x);
    while rr.sqrt() > target && it < max_iter {
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        it += 1;
        monitor(it, &x);
    }
    let residual = relative_residual(a, &x, b);
    let report =
        SolveReport { iterations: it, residual, converged: residual <= cfg.tolerance, wall_time: start.elapsed() };
    (x, report)
}
