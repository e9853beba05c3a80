//! Dense rank, index and Drazin-inverse computations for small matrices.

use nalgebra::{DMatrix, DVector};

use super::{cg, SolverConfig};
use crate::error::{Error, Result};

/// Relative threshold below which singular values count as zero.
pub const RANK_TOL: f64 = 1e-9;

const JACOBI_SWEEPS: usize = 80;

/// Singular value decomposition `m = u diag(s) vt` with values descending.
/// `u` has `min(rows, cols)` columns when `rows >= cols` and is square
/// otherwise; `vt` is square when `rows >= cols` and has `rows` rows
/// otherwise. Columns of `u` belonging to zero singular values are zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub vt: DMatrix<f64>,
}

/// One-sided Jacobi: rotates column pairs of `g` until they are mutually
/// orthogonal, accumulating the rotations in `v` when given.
fn jacobi_orthogonalize(g: &mut DMatrix<f64>, mut v: Option<&mut DMatrix<f64>>) -> Result<()> {
    let (m, n) = g.shape();
    let tol = (m as f64).sqrt() * f64::EPSILON;
    // Columns this small relative to the whole matrix are left alone; their
    // mutual angles are roundoff.
    let negligible = (1e-3 * f64::EPSILON).powi(2) * g.norm_squared();
    let mut sq: Vec<f64> = (0..n).map(|j| g.column(j).norm_squared()).collect();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (sq[p], sq[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = g.column(p).dot(&g.column(q));
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(g.as_mut_slice(), m, p, q, c, s);
                sq[p] = g.column(p).norm_squared();
                sq[q] = g.column(q).norm_squared();
                if let Some(v) = v.as_deref_mut() {
                    let rows = v.nrows();
                    rotate(v.as_mut_slice(), rows, p, q, c, s);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Internal("Jacobi SVD did not converge".into()))
}

/// Rotates columns `p < q` of a column-major matrix with `rows` rows.
fn rotate(data: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

pub fn svd(m: &DMatrix<f64>) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.transpose())?;
        return Ok(Svd { u: t.vt.transpose(), singular_values: t.singular_values, vt: t.u.transpose() });
    }
    let mut g = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    jacobi_orthogonalize(&mut g, Some(&mut v))?;
    let norms: Vec<f64> = (0..cols).map(|j| g.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMatrix::zeros(rows, cols);
    let mut vt = DMatrix::zeros(cols, cols);
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u.set_column(k, &(g.column(j) / norms[j]));
        }
        vt.set_row(k, &v.column(j).transpose());
    }
    Ok(Svd { u, singular_values: order.iter().map(|&j| norms[j]).collect(), vt })
}

/// Singular values, descending. Larger inputs are first reduced to the
/// triangular factor of a column-pivoted QR decomposition.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let tall = if m.nrows() >= m.ncols() { m.clone() } else { m.transpose() };
    let mut g = if tall.ncols() > 32 { tall.col_piv_qr().r().transpose() } else { tall };
    jacobi_orthogonalize(&mut g, None)?;
    let mut s: Vec<f64> = (0..g.ncols()).map(|j| g.column(j).norm()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of singular values above `rel_tol` times the largest.
pub fn rank_with_tol(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    Ok(count_above(&singular_values(m)?, rel_tol))
}

fn count_above(values: &[f64], rel_tol: f64) -> usize {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|v| v.abs() > rel_tol * max).count()
}

fn stable(values: &[f64]) -> Result<usize> {
    let r = count_above(values, RANK_TOL);
    let lo = count_above(values, RANK_TOL / 10.0);
    let hi = count_above(values, RANK_TOL * 10.0);
    if r != lo || r != hi {
        return Err(Error::Internal(format!("numerical rank not stable: {hi}/{r}/{lo}")));
    }
    Ok(r)
}

/// Rank at [`RANK_TOL`], required to be unchanged at ten times and a tenth
/// of that threshold.
pub fn stable_rank(m: &DMatrix<f64>) -> Result<usize> {
    stable(&singular_values(m)?)
}

/// Ranks of `A^k` for increasing `k`, each thresholded against `||A||^k`.
fn power_ranks(a: &DMatrix<f64>, upto: usize) -> Result<Vec<usize>> {
    let n = a.nrows();
    let norm_a = singular_values(a)?.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut ranks = vec![n];
    let mut p = DMatrix::<f64>::identity(n, n);
    for k in 1..=upto {
        p = &p * a;
        let thresh = RANK_TOL * norm_a.powi(k as i32).max(1e-300);
        ranks.push(singular_values(&p)?.iter().filter(|&&s| s > thresh).count());
        if ranks[k] == ranks[k - 1] && k >= 2 {
            break;
        }
    }
    Ok(ranks)
}

/// Smallest `k >= 0` with `rank A^k = rank A^(k+1)`.
pub fn matrix_index(a: &DMatrix<f64>) -> Result<usize> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0);
    }
    let ranks = power_ranks(a, n + 1)?;
    Ok((0..ranks.len() - 1).find(|&k| ranks[k] == ranks[k + 1]).unwrap_or(n))
}

/// Drazin inverse via the core-nilpotent splitting `R(A^k) + N(A^k)`.
pub fn drazin_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidSpec("Drazin inverse needs a square matrix".into()));
    }
    let k = matrix_index(a)?;
    if k == 0 {
        return a.clone().try_inverse().ok_or_else(|| Error::Internal("index 0 matrix not invertible".into()));
    }
    let r = power_ranks(a, k)?[k];
    if r == 0 {
        return Ok(DMatrix::zeros(n, n));
    }
    let Svd { u, vt, .. } = svd(&a.pow(k as u32))?;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for c in 0..r {
        t.set_column(c, &u.column(c));
    }
    for c in r..n {
        t.set_column(c, &vt.row(c).transpose());
    }
    let tinv = t.clone().try_inverse().ok_or_else(|| Error::Internal("range and kernel not complementary".into()))?;
    let core = (&tinv * a * &t).view((0, 0), (r, r)).into_owned();
    let core_inv = core.try_inverse().ok_or_else(|| Error::Internal("singular core block".into()))?;
    let mut d = DMatrix::<f64>::zeros(n, n);
    d.view_mut((0, 0), (r, r)).copy_from(&core_inv);
    Ok(&t * d * tinv)
}

/// Moore-Penrose inverse, dropping singular values below [`RANK_TOL`]
/// relative to the largest.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let Svd { u, singular_values: s, vt } = svd(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (i, &si) in s.iter().enumerate() {
        if si > RANK_TOL * smax {
            out += vt.row(i).transpose() * u.column(i).transpose() / si;
        }
    }
    Ok(out)
}

/// Drazin inverse by the closed form `A^k (A^(2k+1))^+ A^k`.
pub fn drazin_by_pseudoinverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = matrix_index(a)? as u32;
    let ak = a.pow(k);
    Ok(&ak * pseudo_inverse(&a.pow(2 * k + 1))? * &ak)
}

/// Largest relative violation of the three Drazin identities.
pub fn drazin_axiom_defect(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<f64> {
    let k = matrix_index(a)? as u32;
    let scale = |m: &DMatrix<f64>| m.norm().max(1e-300);
    let e1 = (d * a * d - d).norm() / scale(d).max(1.0);
    let e2 = (a * d - d * a).norm() / (scale(a) * scale(d)).max(1.0);
    let ak = a.pow(k);
    let e3 = (a.pow(k + 1) * d - &ak).norm() / scale(&ak).max(1.0);
    Ok(e1.max(e2).max(e3))
}

/// Outcome of solving a singular symmetric system by conjugate gradients.
#[derive(Clone, Debug, PartialEq)]
pub enum KrylovVerdict {
    /// `b` lies in the range; CG reached `x`, which differs from `A^D b` by
    /// `difference` (max norm, relative to `||A^D b||`).
    Solution { x: Vec<f64>, drazin: Vec<f64>, difference: f64 },
    /// `b` has a component of relative size `component` outside the range.
    NoKrylovSolution { component: f64 },
}

/// Compares the CG solution of `A x = b` against `A^D b`.
pub fn krylov_solution_check(a: &DMatrix<f64>, b: &[f64]) -> Result<KrylovVerdict> {
    let n = a.nrows();
    let bv = DVector::from_column_slice(b);
    let nb = bv.norm();
    if nb == 0.0 {
        return Ok(KrylovVerdict::Solution { x: vec![0.0; n], drazin: vec![0.0; n], difference: 0.0 });
    }
    let k = matrix_index(a)? as u32;
    let Svd { u, singular_values: s, .. } = svd(&a.pow(k))?;
    let smax = s.first().copied().unwrap_or(0.0);
    let mut proj = DVector::zeros(n);
    for (i, &si) in s.iter().enumerate() {
        if si > RANK_TOL * smax {
            let ui = u.column(i);
            proj += ui * ui.dot(&bv);
        }
    }
    let component = (&bv - proj).norm() / nb;
    if component > 1e-10 {
        return Ok(KrylovVerdict::NoKrylovSolution { component });
    }
    let d = drazin_inverse(a)?;
    let xd = &d * &bv;
    let cfg = SolverConfig { tolerance: 1e-14, max_iter: Some(20 * n), restart: 20 };
    let (x, _) = cg(a, b, &vec![0.0; n], &cfg);
    let scale = xd.amax().max(1e-300);
    let difference = x.iter().zip(xd.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale;
    Ok(KrylovVerdict::Solution { x, drazin: xd.as_slice().to_vec(), difference })
}
