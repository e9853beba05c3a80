use std::time::Instant;

use super::{dot, norm, relative_residual, LinearOperator, SolveReport, SolverConfig};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
///
/// Iterations count Arnoldi steps. A restart cycle that fails to reduce the
/// residual ends the solve unconverged.
pub fn gmres_restarted<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: &[f64],
    cfg: &SolverConfig,
) -> (Vec<f64>, SolveReport) {
    let start = Instant::now();
    let n = b.len();
    let m = cfg.restart.max(1).min(n.max(1));
    let max_iter = cfg.max_iter_for(n);
    let nb = norm(b);
    let scale = if nb > 0.0 { nb } else { 1.0 };
    let target = cfg.tolerance * scale;

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    let mut hcol = vec![0.0; m + 1];
    let mut hess: Vec<Vec<f64>> = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut it = 0;
    let mut last_beta = f64::INFINITY;

    loop {
        a.apply(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        if beta <= target || it >= max_iter || beta >= last_beta * (1.0 - 1e-14) {
            break;
        }
        last_beta = beta;
        for (vi, ri) in v[0].iter_mut().zip(&r) {
            *vi = ri / beta;
        }
        g.iter_mut().for_each(|gi| *gi = 0.0);
        g[0] = beta;
        let mut k = 0;
        while k < m && it < max_iter {
            a.apply(&v[k], &mut w);
            for j in 0..=k {
                let hjk = dot(&w, &v[j]);
                hcol[j] = hjk;
                for (wi, vj) in w.iter_mut().zip(&v[j]) {
                    *wi -= hjk * vj;
                }
            }
            let hnext = norm(&w);
            hcol[k + 1] = hnext;
            if hnext > 0.0 {
                for (vi, wi) in v[k + 1].iter_mut().zip(&w) {
                    *vi = wi / hnext;
                }
            }
            for j in 0..k {
                let t = cs[j] * hcol[j] + sn[j] * hcol[j + 1];
                hcol[j + 1] = -sn[j] * hcol[j] + cs[j] * hcol[j + 1];
                hcol[j] = t;
            }
            let denom = hcol[k].hypot(hcol[k + 1]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = hcol[k] / denom;
                sn[k] = hcol[k + 1] / denom;
            }
            hcol[k] = denom;
            hcol[k + 1] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            for j in 0..=k {
                hess[j][k] = hcol[j];
            }
            k += 1;
            it += 1;
            if g[k].abs() <= target || hnext == 0.0 {
                break;
            }
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| hess[i][j] * y[j]).sum();
            y[i] = if hess[i][i] != 0.0 { (g[i] - s) / hess[i][i] } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vji) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vji;
            }
        }
    }
    let residual = relative_residual(a, &x, b);
    let report =
        SolveReport { iterations: it, residual, converged: residual <= cfg.tolerance, wall_time: start.elapsed() };
    (x, report)
}
