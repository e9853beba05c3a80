//! The local P1-nonconforming element.
//!
//! A function is linear on every cell and is stored as its value at the
//! cell center plus its gradient. Local corners are numbered so that bit
//! `a` of the corner number selects the upper side along axis `a`; local
//! faces are ordered `[x-, x+, y-, y+, z-, z+]`.

use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Linear polynomial on one cell: `center + grad . (x - x_center)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LocalLinear {
    pub center: f64,
    pub grad: [f64; 3],
}

impl LocalLinear {
    pub fn constant(c: f64) -> Self {
        LocalLinear { center: c, grad: [0.0; 3] }
    }

    /// Value at `offset` from the lower cell corner.
    pub fn eval(&self, offset: [f64; 3], h: f64) -> f64 {
        self.center + self.grad.iter().zip(offset).map(|(g, x)| g * (x - 0.5 * h)).sum::<f64>()
    }

    /// Coefficients `(a, b, c[, d])` of `a + b x + c y (+ d z)` with `x`
    /// measured from the lower cell corner.
    pub fn coeffs(&self, h: f64, dim: usize) -> Vec<f64> {
        let a = self.center - 0.5 * h * self.grad[..dim].iter().sum::<f64>();
        std::iter::once(a).chain(self.grad[..dim].iter().copied()).collect()
    }

    pub fn from_coeffs(c: &[f64], h: f64) -> Self {
        let mut grad = [0.0; 3];
        grad[..c.len() - 1].copy_from_slice(&c[1..]);
        let center = c[0] + 0.5 * h * grad.iter().sum::<f64>();
        LocalLinear { center, grad }
    }

    /// Midpoint values on the `2 dim` local faces.
    pub fn face_values(&self, h: f64, dim: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * dim);
        for a in 0..dim {
            v.push(self.center - 0.5 * h * self.grad[a]);
            v.push(self.center + 0.5 * h * self.grad[a]);
        }
        v
    }

    /// Recovers the polynomial from face midpoint values, which must obey
    /// the dice rule.
    pub fn from_face_values(values: &[f64], h: f64, dim: usize) -> Result<Self> {
        if values.len() != 2 * dim {
            return Err(Error::OutOfRange { index: values.len(), len: 2 * dim });
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if let Some(r) = dice_residuals(values, dim).into_iter().find(|r| r.abs() > 1e-12 * scale) {
            return Err(Error::NotRepresentable(format!("dice rule violated by {r:.3e}")));
        }
        let center = values.iter().sum::<f64>() / (2 * dim) as f64;
        let mut grad = [0.0; 3];
        for a in 0..dim {
            grad[a] = (values[2 * a + 1] - values[2 * a]) / h;
        }
        Ok(LocalLinear { center, grad })
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }
}

impl Add for LocalLinear {
    type Output = LocalLinear;
    fn add(mut self, o: LocalLinear) -> LocalLinear {
        self += o;
        self
    }
}

impl Sub for LocalLinear {
    type Output = LocalLinear;
    fn sub(self, o: LocalLinear) -> LocalLinear {
        self + o * -1.0
    }
}

impl AddAssign for LocalLinear {
    fn add_assign(&mut self, o: LocalLinear) {
        self.center += o.center;
        for a in 0..3 {
            self.grad[a] += o.grad[a];
        }
    }
}

impl Mul<f64> for LocalLinear {
    type Output = LocalLinear;
    fn mul(self, s: f64) -> LocalLinear {
        LocalLinear { center: self.center * s, grad: self.grad.map(|g| g * s) }
    }
}

/// Opposite-pair sums minus the x pair sum, one entry per axis after x.
pub fn dice_residuals(values: &[f64], dim: usize) -> Vec<f64> {
    let x = values[0] + values[1];
    (1..dim).map(|a| x - values[2 * a] - values[2 * a + 1]).collect()
}

/// The node-based function of a cell corner: 1/2 on the faces meeting the
/// corner, 0 on the others.
pub fn local_node_basis(corner: usize, h: f64, dim: usize) -> LocalLinear {
    debug_assert!(corner < 1 << dim);
    let mut grad = [0.0; 3];
    for (a, g) in grad.iter_mut().enumerate().take(dim) {
        let s = if (corner >> a) & 1 == 1 { 1.0 } else { -1.0 };
        *g = s / (2.0 * h);
    }
    LocalLinear { center: 0.25, grad }
}

/// Element stiffness `int_K grad phi_i . grad phi_j` over the corners.
pub fn local_stiffness(h: f64, dim: usize) -> DMatrix<f64> {
    let n = 1 << dim;
    let vol = h.powi(dim as i32);
    let basis: Vec<LocalLinear> = (0..n).map(|c| local_node_basis(c, h, dim)).collect();
    DMatrix::from_fn(n, n, |i, j| vol * (0..dim).map(|a| basis[i].grad[a] * basis[j].grad[a]).sum::<f64>())
}

/// Element load `int_K f phi_c` for every corner `c`.
pub fn local_load<F>(f: F, origin: [f64; 3], h: f64, dim: usize, rule: &QuadratureRule) -> Vec<f64>
where
    F: Fn([f64; 3]) -> f64,
{
    let n = 1 << dim;
    let basis: Vec<LocalLinear> = (0..n).map(|c| local_node_basis(c, h, dim)).collect();
    let mut out = vec![0.0; n];
    for (off, w) in rule.cell_points(h) {
        let x = [origin[0] + off[0], origin[1] + off[1], origin[2] + off[2]];
        let fw = f(x) * w;
        for (o, b) in out.iter_mut().zip(&basis) {
            *o += fw * b.eval(off, h);
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = 0.5 * (1.0 - t);
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[i] = 0.5 * wt;
        w[n - 1 - i] = 0.5 * wt;
    }
    (x, w)
}

/// Tensor Gauss rule on the reference cell `[0, 1]^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    dim: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Default number of points per axis for load vectors.
    pub const DEFAULT_ORDER: usize = 2;
    /// Default number of points per axis for error norms.
    pub const ERROR_ORDER: usize = 5;

    /// `order` points per axis; exact for degree `2 order - 1` per axis.
    pub fn gauss(order: usize, dim: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let nk = if dim == 3 { order } else { 1 };
        let nj = if dim >= 2 { order } else { 1 };
        for k in 0..nk {
            for j in 0..nj {
                for i in 0..order {
                    let mut p = [x[i], 0.0, 0.0];
                    let mut wt = w[i];
                    if dim >= 2 {
                        p[1] = x[j];
                        wt *= w[j];
                    }
                    if dim == 3 {
                        p[2] = x[k];
                        wt *= w[k];
                    }
                    points.push(p);
                    weights.push(wt);
                }
            }
        }
        QuadratureRule { order, dim, points, weights }
    }

    pub fn default_for(dim: usize) -> Self {
        Self::gauss(Self::DEFAULT_ORDER, dim)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points as offsets from the lower corner of a cube cell of size `h`,
    /// with weights summing to its volume.
    pub fn cell_points(&self, h: f64) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        let vol = h.powi(self.dim as i32);
        let dim = self.dim;
        self.points.iter().zip(&self.weights).map(move |(p, &w)| {
            let mut off = [0.0; 3];
            for a in 0..dim {
                off[a] = p[a] * h;
            }
            (off, w * vol)
        })
    }
}

/// Anything that is a linear polynomial on every cell of a mesh.
pub trait CellwiseLinear {
    fn mesh(&self) -> &Mesh;
    fn on_cell(&self, cell: usize) -> LocalLinear;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceFunctionalKind {
    Midpoint,
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceFunctional {
    pub kind: FaceFunctionalKind,
    pub face: usize,
}

/// Evaluates a face functional using the incident cell with the lower id.
pub fn sigma<U: CellwiseLinear + ?Sized>(functional: FaceFunctional, u: &U) -> Result<f64> {
    let mesh = u.mesh();
    let nf = mesh.num_faces();
    if functional.face >= nf {
        return Err(Error::OutOfRange { index: functional.face, len: nf });
    }
    let face = mesh.face(functional.face);
    let cell =
        face.cells.iter().flatten().copied().min().ok_or_else(|| Error::Internal("face without cells".into()))?;
    sigma_from_cell(functional, u, cell)
}

/// Evaluates a face functional from the polynomial of one incident cell.
pub fn sigma_from_cell<U: CellwiseLinear + ?Sized>(functional: FaceFunctional, u: &U, cell: usize) -> Result<f64> {
    let mesh = u.mesh();
    let h = mesh.uniform_h().ok_or_else(|| Error::Unsupported("non-uniform mesh".into()))?;
    let d = mesh.dim();
    let lf = mesh
        .local_face(cell, functional.face)
        .ok_or_else(|| Error::NotRepresentable(format!("face {} is not a face of cell {cell}", functional.face)))?;
    let normal = lf / 2;
    let fixed = (lf % 2) as f64 * h;
    let p = u.on_cell(cell);
    match functional.kind {
        FaceFunctionalKind::Midpoint => {
            let mut off = [0.5 * h; 3];
            off[normal] = fixed;
            for o in off.iter_mut().skip(d) {
                *o = 0.5 * h;
            }
            Ok(p.eval(off, h))
        }
        FaceFunctionalKind::Average => {
            let rule = QuadratureRule::gauss(2, d - 1);
            let others: Vec<usize> = (0..d).filter(|&a| a != normal).collect();
            let mut acc = 0.0;
            let mut area = 0.0;
            for (q, w) in rule.cell_points(h) {
                let mut off = [0.5 * h; 3];
                off[normal] = fixed;
                for (slot, &a) in others.iter().enumerate() {
                    off[a] = q[slot];
                }
                acc += w * p.eval(off, h);
                area += w;
            }
            Ok(acc / area)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn node_basis_closed_forms() {
        let h = 0.37;
        let p = local_node_basis(0, h, 2);
        assert!(close(p.coeffs(h, 2)[0], 0.75, 1e-15));
        assert!(close(p.coeffs(h, 2)[1], -0.5 / h, 1e-15));
        let p = local_node_basis(3, h, 2);
        let c = p.coeffs(h, 2);
        assert!(close(c[0], -0.25, 1e-15) && close(c[1], 0.5 / h, 1e-15) && close(c[2], 0.5 / h, 1e-15));
        let p = local_node_basis(0, h, 3);
        let c = p.coeffs(h, 3);
        assert!(close(c[0], 1.0, 1e-15) && c[1..].iter().all(|&g| close(g, -0.5 / h, 1e-15)));
    }

    #[test]
    fn node_basis_face_values() {
        for dim in [2, 3] {
            for c in 0..1 << dim {
                let v = local_node_basis(c, 1.3, dim).face_values(1.3, dim);
                for a in 0..dim {
                    let upper = (c >> a) & 1;
                    assert!(close(v[2 * a + upper], 0.5, 1e-15));
                    assert!(v[2 * a + 1 - upper].abs() < 1e-15);
                }
                assert!(dice_residuals(&v, dim).iter().all(|r| r.abs() < 1e-15));
            }
        }
    }

    #[test]
    fn face_value_roundtrip() {
        let p = LocalLinear { center: 0.3, grad: [1.5, -2.0, 0.7] };
        let v = p.face_values(0.1, 3);
        let q = LocalLinear::from_face_values(&v, 0.1, 3).unwrap();
        assert!(close(q.center, p.center, 1e-14));
        for a in 0..3 {
            assert!(close(q.grad[a], p.grad[a], 1e-13));
        }
        assert!(LocalLinear::from_face_values(&[1.0, 0.0, 0.0, 0.0], 0.1, 2).is_err());
    }

    #[test]
    fn stiffness_entries() {
        let k = local_stiffness(0.2, 2);
        for i in 0..4usize {
            for j in 0..4 {
                let expect = match (i ^ j).count_ones() {
                    0 => 0.5,
                    1 => 0.0,
                    _ => -0.5,
                };
                assert!(close(k[(i, j)], expect, 1e-14));
            }
        }
        let h = 0.2;
        let k = local_stiffness(h, 3);
        for i in 0..8usize {
            for j in 0..8 {
                let expect = match (i ^ j).count_ones() {
                    0 => 0.75 * h,
                    1 => 0.25 * h,
                    2 => -0.25 * h,
                    _ => -0.75 * h,
                };
                assert!(close(k[(i, j)], expect, 1e-14));
            }
            assert!(k.row(i).sum().abs() < 1e-15);
        }
    }

    #[test]
    fn load_of_constant_and_linear() {
        let rule = QuadratureRule::default_for(2);
        let l = local_load(|_| 1.0, [0.0; 3], 0.25, 2, &rule);
        assert!(l.iter().all(|&v| close(v, 1.0 / 64.0, 1e-14)));
        let h = 0.3;
        let l = local_load(|x| x[0], [0.0; 3], h, 2, &rule);
        assert!(close(l[0], h.powi(3) / 12.0, 1e-14));
        let l = local_load(|_| 0.0, [0.0; 3], h, 3, &QuadratureRule::default_for(3));
        assert!(l.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gauss_exactness() {
        for q in 1..=6 {
            let (x, w) = gauss_legendre(q);
            assert!(close(w.iter().sum::<f64>(), 1.0, 1e-14));
            for deg in 0..2 * q {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!(close(s, 1.0 / (deg as f64 + 1.0), 1e-13), "q={q} deg={deg}");
            }
        }
        let rule = QuadratureRule::gauss(3, 3);
        let vol: f64 = rule.cell_points(0.5).map(|(_, w)| w).sum();
        assert!(close(vol, 0.125, 1e-14));
    }
}
