//! Global assembly, the four solution options for the periodic Poisson
//! problem, and discrete solutions.

pub mod export;
mod options;

use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem_core::{CellwiseLinear, LocalLinear, QuadratureRule};
use crate::linalg::{CsrMatrix, SolverConfig};
use crate::mesh::Mesh;
use crate::space::{BasisCatalog, Member};

pub use options::{
    option_system, solve_option, solve_option1, solve_option2, solve_option3, solve_option3_monitored, solve_option4,
    SchemeOption,
};

/// Right-hand sides are closures of the point `[x, y, z]`.
pub trait ScalarField: Fn([f64; 3]) -> f64 + Sync {}
impl<F: Fn([f64; 3]) -> f64 + Sync> ScalarField for F {}

/// Settings shared by the solution options.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub solver: SolverConfig,
    /// Gauss points per axis for load vectors.
    pub quadrature_order: usize,
    /// Gauss points per axis for error norms.
    pub error_quadrature_order: usize,
    /// Subtract the quadrature mean of `f` when it is not negligible;
    /// otherwise a nonzero mean is reported as an inconsistent system.
    pub subtract_mean: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            solver: SolverConfig::default(),
            quadrature_order: QuadratureRule::DEFAULT_ORDER,
            error_quadrature_order: QuadratureRule::ERROR_ORDER,
            subtract_mean: true,
        }
    }
}

/// Which bilinear form a Gram block integrates.
#[derive(Clone, Copy, Debug)]
pub enum Form<'a> {
    Stiffness,
    Mass(&'a QuadratureRule),
}

/// Cells on which a member can be nonzero.
pub fn support_cells(mesh: &Mesh, member: &Member) -> Vec<usize> {
    match member {
        Member::Node(z) => {
            let d = mesh.dim();
            let idx = mesh.node_index(*z);
            let n = mesh.counts();
            let mut out = Vec::with_capacity(1 << d);
            'corners: for c in 0..1usize << d {
                let mut ci = [0usize; 3];
                for a in 0..d {
                    let b = (c >> a) & 1;
                    if idx[a] >= b {
                        ci[a] = idx[a] - b;
                    } else if mesh.is_periodic() {
                        ci[a] = n[a] - 1;
                    } else {
                        continue 'corners;
                    }
                    if ci[a] >= n[a] {
                        continue 'corners;
                    }
                }
                out.push(mesh.cell_id(ci));
            }
            out.sort_unstable();
            out.dedup();
            out
        }
        Member::Alternating(s) => match s.layer {
            None => (0..mesh.num_cells()).collect(),
            Some((axis, l)) => {
                let n = mesh.counts();
                let (p, q) = match axis {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let mut out = Vec::with_capacity(n[p] * n[q]);
                for b in 0..n[q] {
                    for a in 0..n[p] {
                        let mut ci = [0usize; 3];
                        ci[axis] = l;
                        ci[p] = a;
                        ci[q] = b;
                        out.push(mesh.cell_id(ci));
                    }
                }
                out.sort_unstable();
                out
            }
        },
    }
}

fn pair_integral(form: Form<'_>, p: &LocalLinear, q: &LocalLinear, h: f64, dim: usize) -> f64 {
    match form {
        Form::Stiffness => h.powi(dim as i32) * (0..dim).map(|a| p.grad[a] * q.grad[a]).sum::<f64>(),
        Form::Mass(rule) => rule.cell_points(h).map(|(x, w)| w * p.eval(x, h) * q.eval(x, h)).sum(),
    }
}

/// Gram block over member slots `rows` x `cols`, assembled row by row.
pub fn gram_block(catalog: &BasisCatalog, rows: Range<usize>, cols: Range<usize>, form: Form<'_>) -> CsrMatrix {
    let mesh = catalog.mesh();
    let h = catalog.h();
    let d = mesh.dim();
    let members = catalog.members();
    let out: Vec<Vec<(usize, f64)>> = rows
        .clone()
        .into_par_iter()
        .map(|i| {
            let mut entries = Vec::new();
            for cell in support_cells(mesh, &members[i]) {
                let local = catalog.on_cell(cell);
                let Some((_, p)) = local.iter().find(|(s, _)| *s == i) else { continue };
                for (j, q) in &local {
                    if cols.contains(j) {
                        entries.push((j - cols.start, pair_integral(form, p, q, h, d)));
                    }
                }
            }
            entries
        })
        .collect();
    let mut m = CsrMatrix::from_rows(cols.len(), out);
    if rows == cols {
        if let Ok(s) = m.clone().into_symmetric() {
            m = s;
        }
    }
    m
}

/// Quadrature integral of `f` over the domain and of `|f|`.
pub fn integrate<F: ScalarField>(mesh: &Mesh, f: &F, rule: &QuadratureRule) -> (f64, f64) {
    let h = mesh.uniform_h().expect("uniform mesh");
    let parts: Vec<(f64, f64)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let o = mesh.cell(c).origin;
            rule.cell_points(h).fold((0.0, 0.0), |(s, a), (x, w)| {
                let v = f([o[0] + x[0], o[1] + x[1], o[2] + x[2]]);
                (s + w * v, a + w * v.abs())
            })
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(s, a), (ps, pa)| (s + ps, a + pa))
}

/// Load vector `int f m` over all members, shifted by `shift` (`f - shift`).
pub fn load_vector<F: ScalarField>(catalog: &BasisCatalog, f: &F, shift: f64, rule: &QuadratureRule) -> Vec<f64> {
    let mesh = catalog.mesh();
    let h = catalog.h();
    let per_cell: Vec<Vec<(usize, f64)>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let o = mesh.cell(c).origin;
            let pts: Vec<([f64; 3], f64)> = rule
                .cell_points(h)
                .map(|(x, w)| (x, w * (f([o[0] + x[0], o[1] + x[1], o[2] + x[2]]) - shift)))
                .collect();
            let mut out = Vec::with_capacity(14);
            catalog.for_each_on_cell(c, |slot, p| {
                out.push((slot, pts.iter().map(|(x, fw)| fw * p.eval(*x, h)).sum::<f64>()));
            });
            out
        })
        .collect();
    let mut b = vec![0.0; catalog.len()];
    for cell in per_cell {
        for (slot, v) in cell {
            b[slot] += v;
        }
    }
    b
}

/// Mean value of `f` to subtract before assembly, per the configuration.
pub(crate) fn load_shift<F: ScalarField>(mesh: &Mesh, f: &F, rule: &QuadratureRule, cfg: &SchemeConfig) -> f64 {
    let (int, abs) = integrate(mesh, f, rule);
    if cfg.subtract_mean && int.abs() > 1e-12 * abs {
        int / mesh.spec().volume()
    } else {
        0.0
    }
}

/// A linear system over the members of a catalog.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub catalog: Arc<BasisCatalog>,
    /// Row replaced by the zero-mean condition, if any.
    pub modified_row: Option<usize>,
}

fn check_mesh(mesh: &Mesh, catalog: &BasisCatalog) -> Result<()> {
    let cm = catalog.mesh();
    if cm.spec() != mesh.spec() || cm.bc() != mesh.bc() {
        return Err(Error::MeshMismatch);
    }
    Ok(())
}

/// Stiffness system of a catalog. Node and alternating members are
/// a-orthogonal, so only the two diagonal blocks are assembled.
pub fn assemble<F: ScalarField>(
    mesh: &Mesh,
    catalog: Arc<BasisCatalog>,
    f: &F,
    rule: &QuadratureRule,
) -> Result<AssembledSystem> {
    check_mesh(mesh, &catalog)?;
    let nb = catalog.num_node_members();
    let n = catalog.len();
    let sb = gram_block(&catalog, 0..nb, 0..nb, Form::Stiffness);
    let sa = gram_block(&catalog, nb..n, nb..n, Form::Stiffness);
    let matrix = if n == nb { sb } else { CsrMatrix::block_diag(&sb, &sa) };
    let rhs = load_vector(&catalog, f, 0.0, rule);
    Ok(AssembledSystem { matrix, rhs, catalog, modified_row: None })
}

/// Coefficients over a catalog; linear on every cell.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    catalog: Arc<BasisCatalog>,
    coeffs: Vec<f64>,
}

impl DiscreteSolution {
    pub fn new(catalog: Arc<BasisCatalog>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != catalog.len() {
            return Err(Error::OutOfRange { index: coeffs.len(), len: catalog.len() });
        }
        Ok(DiscreteSolution { catalog, coeffs })
    }

    pub fn catalog(&self) -> &Arc<BasisCatalog> {
        &self.catalog
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients of the node-based members.
    pub fn node_coeffs(&self) -> &[f64] {
        &self.coeffs[..self.catalog.num_node_members()]
    }

    /// Coefficients of the alternating members.
    pub fn alternating_coeffs(&self) -> &[f64] {
        &self.coeffs[self.catalog.num_node_members()..]
    }

    /// Sum of the node-based coefficients.
    pub fn node_sum(&self) -> f64 {
        self.node_coeffs().iter().sum()
    }

    /// Value at `x`, from the polynomial of the containing cell.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let mesh = self.catalog.mesh();
        let c = mesh.locate(&x);
        let o = mesh.cell(c).origin;
        self.on_cell(c).eval([x[0] - o[0], x[1] - o[1], x[2] - o[2]], self.catalog.h())
    }

    /// Face-midpoint values, indexed by face id.
    pub fn face_values(&self) -> Vec<f64> {
        self.catalog.face_values(&self.coeffs)
    }

    pub fn integral(&self) -> f64 {
        let mesh = self.catalog.mesh();
        let vol = self.catalog.h().powi(mesh.dim() as i32);
        (0..mesh.num_cells()).map(|c| vol * self.on_cell(c).center).sum()
    }

    /// Largest gap between the values of the two cells sharing a face midpoint.
    pub fn continuity_defect(&self) -> f64 {
        let mesh = self.catalog.mesh();
        let h = self.catalog.h();
        let d = mesh.dim();
        let mut worst = 0.0f64;
        for c in 0..mesh.num_cells() {
            let v = self.on_cell(c).face_values(h, d);
            for (lf, &f) in mesh.cell_faces(c).iter().enumerate() {
                let face = mesh.face(f);
                let other = if lf % 2 == 0 { face.cells[0] } else { face.cells[1] };
                let Some(o) = other else { continue };
                let w = self.on_cell(o).face_values(h, d);
                let olf = if lf % 2 == 0 { lf + 1 } else { lf - 1 };
                worst = worst.max((v[lf] - w[olf]).abs());
            }
        }
        worst
    }
}

impl CellwiseLinear for DiscreteSolution {
    fn mesh(&self) -> &Mesh {
        self.catalog.mesh()
    }

    fn on_cell(&self, cell: usize) -> LocalLinear {
        self.catalog.combination_on_cell(&self.coeffs, cell)
    }
}

/// L2 and broken H1 norms of the difference of two discrete functions.
pub fn compare_solutions<A, B>(a: &A, b: &B) -> Result<(f64, f64)>
where
    A: CellwiseLinear + ?Sized,
    B: CellwiseLinear + ?Sized,
{
    let (ma, mb) = (a.mesh(), b.mesh());
    if ma.spec() != mb.spec() || ma.bc() != mb.bc() {
        return Err(Error::MeshMismatch);
    }
    let h = ma.uniform_h().ok_or_else(|| Error::Unsupported("non-uniform mesh".into()))?;
    let d = ma.dim();
    let rule = QuadratureRule::gauss(2, d);
    let vol = h.powi(d as i32);
    let (l2, h1) = (0..ma.num_cells())
        .map(|c| {
            let e = a.on_cell(c) - b.on_cell(c);
            let l2: f64 = rule.cell_points(h).map(|(x, w)| w * e.eval(x, h).powi(2)).sum();
            (l2, vol * e.grad_norm_sq())
        })
        .fold((0.0, 0.0), |(s, t), (x, y)| (s + x, t + y));
    Ok((l2.sqrt(), h1.sqrt()))
}
