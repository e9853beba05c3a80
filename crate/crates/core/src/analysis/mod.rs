//! Error norms and the studies: convergence, 3D rank deficiency and the
//! equivalence of the solution options.

pub mod golden;
mod problems;
pub mod tables;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fem_core::{CellwiseLinear, QuadratureRule};
use crate::linalg::SolveReport;
use crate::mesh::{BoundaryCondition, GridSpec, Mesh};
use crate::schemes::{
    compare_solutions, gram_block, load_vector, solve_option, DiscreteSolution, Form, ScalarField, SchemeConfig,
    SchemeOption,
};
use crate::space::{build_catalog, dim_formulas, stiffness_nullity, CatalogKind};

pub use problems::{bump_constant, ExactSolution, Example, FnSolution, ManufacturedProblem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Broken H1 seminorm.
    pub h1: f64,
}

/// `||u - u_h||_0` and `|u - u_h|_{1,h}` by cellwise quadrature.
pub fn error_norms<E, U>(exact: &E, u: &U, rule: &QuadratureRule) -> ErrorNorms
where
    E: ExactSolution + ?Sized,
    U: CellwiseLinear + Sync + ?Sized,
{
    let mesh = u.mesh();
    let h = mesh.uniform_h().expect("uniform mesh");
    let d = mesh.dim();
    let per_cell: Vec<(f64, f64)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let p = u.on_cell(c);
            let o = mesh.cell(c).origin;
            rule.cell_points(h).fold((0.0, 0.0), |(l2, h1), (off, w)| {
                let x = [o[0] + off[0], o[1] + off[1], o[2] + off[2]];
                let e = exact.u(x) - p.eval(off, h);
                let g = exact.grad(x);
                let ge: f64 = (0..d).map(|a| (g[a] - p.grad[a]).powi(2)).sum();
                (l2 + w * e * e, h1 + w * ge)
            })
        })
        .collect();
    let (l2, h1) = per_cell.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    ErrorNorms { l2: l2.sqrt(), h1: h1.sqrt() }
}

/// Cells per axis for a mesh size written `1/N` (or just `N`).
pub fn parse_h(s: &str) -> Result<usize> {
    let t = s.trim();
    let n = t.strip_prefix("1/").unwrap_or(t);
    match n.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Parse(format!("mesh size '{s}' is not of the form 1/N"))),
    }
}

/// `1/a:1/b` as the halving sequence `a, 2a, ..., b`; a single size is
/// also accepted.
pub fn parse_h_range(s: &str) -> Result<Vec<usize>> {
    match s.split_once(':') {
        None => Ok(vec![parse_h(s)?]),
        Some((a, b)) => halving_sequence(parse_h(a)?, parse_h(b)?),
    }
}

pub fn halving_sequence(coarse: usize, fine: usize) -> Result<Vec<usize>> {
    let mut out = vec![coarse];
    let mut n = coarse;
    while n < fine {
        n *= 2;
        out.push(n);
    }
    if n != fine {
        return Err(Error::Parse(format!("1/{fine} is not reached from 1/{coarse} by halving")));
    }
    Ok(out)
}

/// Observed order between two levels.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_slope(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn unit_mesh(dim: usize, n: usize, bc: BoundaryCondition) -> Result<Arc<Mesh>> {
    Ok(Arc::new(Mesh::new(GridSpec::cube(dim, n)?, bc)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub h1: f64,
    pub h1_order: Option<f64>,
    pub l2: f64,
    pub l2_order: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub example: Example,
    pub option: SchemeOption,
    pub rows: Vec<ConvergenceRow>,
}

/// Solves one problem with one option on one mesh and measures the error.
pub fn run_case(
    problem: &ManufacturedProblem,
    option: SchemeOption,
    n: usize,
    cfg: &SchemeConfig,
) -> Result<(crate::schemes::DiscreteSolution, SolveReport, ErrorNorms)> {
    let mesh = unit_mesh(problem.dim(), n, BoundaryCondition::Periodic)?;
    let f = |x: [f64; 3]| problem.f(x);
    let (u, report) = solve_option(option, &mesh, &f, cfg)?;
    let rule = QuadratureRule::gauss(cfg.error_quadrature_order, problem.dim());
    let norms = error_norms(problem, &u, &rule);
    Ok((u, report, norms))
}

pub fn convergence_study(
    problem: &ManufacturedProblem,
    option: SchemeOption,
    ns: &[usize],
    cfg: &SchemeConfig,
) -> Result<ConvergenceTable> {
    let cases = ns
        .iter()
        .map(|&n| run_case(problem, option, n, cfg).map(|(_, report, e)| (n, report, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_cases(problem.example(), option, &cases))
}

impl ConvergenceTable {
    /// Builds the table from per-mesh results ordered from coarse to fine.
    pub fn from_cases(example: Example, option: SchemeOption, cases: &[(usize, SolveReport, ErrorNorms)]) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cases.len());
        for (n, report, e) in cases {
            let h = 1.0 / *n as f64;
            let (h1_order, l2_order) = match rows.last() {
                Some(p) => (Some(observed_order(p.h1, e.h1, p.h, h)), Some(observed_order(p.l2, e.l2, p.h, h))),
                None => (None, None),
            };
            rows.push(ConvergenceRow {
                n: *n,
                h,
                h1: e.h1,
                h1_order,
                l2: e.l2,
                l2_order,
                iterations: report.iterations,
                residual: report.residual,
                converged: report.converged,
            });
        }
        ConvergenceTable { example, option, rows }
    }

    /// Differences from the published values: errors beyond `rel_tol`
    /// relative, and final-row orders beyond `order_tol`.
    pub fn check_against_published(&self, rel_tol: f64, order_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            let Some(g) = golden::convergence_row(self.example, r.n) else { continue };
            for (name, v, gv) in [("H1", r.h1, g.h1), ("L2", r.l2, g.l2)] {
                let rel = (v / gv - 1.0).abs();
                if rel > rel_tol {
                    out.push(format!("h=1/{} {name} {v:.4e} vs {gv:.4e} ({:.2}%)", r.n, 100.0 * rel));
                }
            }
        }
        if let Some(r) = self.rows.last() {
            if let Some(g) = golden::convergence_row(self.example, r.n) {
                for (name, v, gv) in [("H1 order", r.h1_order, g.h1_order), ("L2 order", r.l2_order, g.l2_order)] {
                    if let (Some(v), Some(gv)) = (v, gv) {
                        if (v - gv).abs() > order_tol {
                            out.push(format!("h=1/{} {name} {v:.3} vs {gv:.3}", r.n));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry {
    pub counts: [usize; 3],
    pub predicted: usize,
    /// Numerical nullity, or why it could not be computed.
    pub computed: std::result::Result<usize, String>,
}

impl RankEntry {
    pub fn matches(&self) -> bool {
        self.computed.as_ref().is_ok_and(|&c| c == self.predicted)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankDeficiencyTable {
    pub entries: Vec<RankEntry>,
}

/// Nullity of the 3D node-based stiffness matrix, numerically and by formula.
pub fn rank_deficiency_study(triples: &[[usize; 3]]) -> RankDeficiencyTable {
    let entries = triples
        .par_iter()
        .map(|&counts| match GridSpec::square_cells(&counts) {
            Ok(spec) => RankEntry {
                counts,
                predicted: dim_formulas(&spec, BoundaryCondition::Periodic).ker_stiffness,
                computed: stiffness_nullity(&spec, BoundaryCondition::Periodic).map_err(|e| e.to_string()),
            },
            Err(e) => RankEntry { counts, predicted: 0, computed: Err(e.to_string()) },
        })
        .collect();
    RankDeficiencyTable { entries }
}

/// Triples `Nx >= Ny >= Nz >= 2` with `Nx <= max`.
pub fn rank_triples(max: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for nz in 2..=max {
        for nx in nz..=max {
            for ny in nz..=nx {
                out.push([nx, ny, nz]);
            }
        }
    }
    out
}

impl RankDeficiencyTable {
    /// Entries that differ from the published table, or published triples
    /// that could not be computed.
    pub fn check_against_published(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.entries {
            let [x, y, z] = e.counts;
            let Some(&(_, _, _, g)) = golden::RANK_DEFICIENCY.iter().find(|t| (t.0, t.1, t.2) == (x, y, z)) else {
                continue;
            };
            match &e.computed {
                Ok(c) if *c == g => {}
                Ok(c) => out.push(format!("({x},{y},{z}): computed {c}, published {g}")),
                Err(msg) => out.push(format!("({x},{y},{z}): {msg}")),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub n: usize,
    pub h: f64,
    /// L2 norm of the option-3 solution.
    pub scale: f64,
    /// Largest pairwise L2 difference among options 1-3.
    pub max_pairwise_l2: f64,
    /// L2 and broken H1 distance between options 3 and 4.
    pub gap_l2: f64,
    pub gap_h1: f64,
    /// Largest relative deviation of the option-3 alternating coefficients
    /// from `int f psi / a(psi, psi)`.
    pub alternating_defect: f64,
    /// Difference between the 3-4 gap and the norm of the alternating part.
    pub gap_vs_alternating: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub example: Example,
    pub rows: Vec<EquivalenceRow>,
    /// Log-log slopes of the 3-4 gaps over the resolved rows; `None` when
    /// fewer than two gaps rise above roundoff.
    pub slope_l2: Option<f64>,
    pub slope_h1: Option<f64>,
    /// Number of rows whose L2 gap exceeds [`GAP_ROUNDOFF`] times the scale.
    pub resolved: usize,
}

/// Gaps below this fraction of the solution scale are treated as roundoff.
pub const GAP_ROUNDOFF: f64 = 1e-10;

pub fn scheme_equivalence_study(
    problem: &ManufacturedProblem,
    ns: &[usize],
    cfg: &SchemeConfig,
) -> Result<EquivalenceReport> {
    if problem.dim() != 2 {
        return Err(Error::Unsupported("the equivalence study compares the 2D options".into()));
    }
    let f = |x: [f64; 3]| problem.f(x);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = unit_mesh(2, n, BoundaryCondition::Periodic)?;
        let sols: Vec<_> = SchemeOption::ALL
            .iter()
            .map(|&o| solve_option(o, &mesh, &f, cfg).map(|(u, _)| u))
            .collect::<Result<_>>()?;
        rows.push(equivalence_row(&sols, &f, cfg)?);
    }
    Ok(EquivalenceReport::from_rows(problem.example(), rows))
}

/// Compares the four 2D solutions of one problem on one mesh, given in
/// option order.
pub fn equivalence_row<F: ScalarField>(sols: &[DiscreteSolution], f: &F, cfg: &SchemeConfig) -> Result<EquivalenceRow> {
    if sols.len() != 4 {
        return Err(invalid(format!("expected 4 solutions, got {}", sols.len())));
    }
    let mesh = sols[2].catalog().mesh().clone();
    let n = mesh.counts()[0];
    let scale = compare_solutions(&sols[2], &Zero(&mesh))?.0;
    let mut max_pairwise_l2 = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            max_pairwise_l2 = max_pairwise_l2.max(compare_solutions(&sols[i], &sols[j])?.0);
        }
    }
    let (gap_l2, gap_h1) = compare_solutions(&sols[2], &sols[3])?;

    let rule = QuadratureRule::gauss(cfg.quadrature_order, 2);
    let shift = crate::schemes::integrate(&mesh, f, &rule).0 / mesh.spec().volume();
    let alt = build_catalog(mesh.clone(), CatalogKind::A)?;
    let load = load_vector(&alt, f, shift, &rule);
    let diag = gram_block(&alt, 0..alt.len(), 0..alt.len(), Form::Stiffness).diagonal();
    let coeffs = sols[2].alternating_coeffs();
    let denom = sols[2].coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    let alternating_defect =
        coeffs.iter().zip(load.iter().zip(&diag)).map(|(c, (b, d))| (c - b / d).abs()).fold(0.0, f64::max) / denom;
    let alt_part = crate::space::Combination { catalog: &alt, coeffs };
    let alt_norm = compare_solutions(&alt_part, &Zero(&mesh))?.0;

    Ok(EquivalenceRow {
        n,
        h: 1.0 / n as f64,
        scale,
        max_pairwise_l2,
        gap_l2,
        gap_h1,
        alternating_defect,
        gap_vs_alternating: (gap_l2 - alt_norm).abs(),
    })
}

impl EquivalenceReport {
    /// Fits the log-log slopes of the 3-4 gaps, skipping rows where the gap
    /// is at roundoff level.
    pub fn from_rows(example: Example, rows: Vec<EquivalenceRow>) -> Self {
        let kept: Vec<&EquivalenceRow> = rows.iter().filter(|r| r.gap_l2 > GAP_ROUNDOFF * r.scale).collect();
        let hs: Vec<f64> = kept.iter().map(|r| r.h).collect();
        let fit = |g: fn(&EquivalenceRow) -> f64| {
            (kept.len() >= 2).then(|| fitted_slope(&hs, &kept.iter().map(|r| g(r)).collect::<Vec<_>>()))
        };
        let slope_l2 = fit(|r| r.gap_l2);
        let slope_h1 = fit(|r| r.gap_h1);
        EquivalenceReport { example, resolved: kept.len(), rows, slope_l2, slope_h1 }
    }
}

/// The zero function on a mesh.
struct Zero<'a>(&'a Mesh);

impl CellwiseLinear for Zero<'_> {
    fn mesh(&self) -> &Mesh {
        self.0
    }
    fn on_cell(&self, _: usize) -> crate::fem_core::LocalLinear {
        crate::fem_core::LocalLinear::default()
    }
}

/// L2 norm of a discrete function.
pub fn l2_norm<U: CellwiseLinear + ?Sized>(u: &U) -> f64 {
    compare_solutions(u, &Zero(u.mesh())).map(|r| r.0).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn h_parsing() {
        assert_eq!(parse_h("1/64").unwrap(), 64);
        assert_eq!(parse_h_range("1/8:1/256").unwrap(), vec![8, 16, 32, 64, 128, 256]);
        assert!(parse_h_range("1/8:1/24").is_err());
        assert!(parse_h("1/0").is_err());
    }

    #[test]
    fn zero_solution_l2_half() {
        let mesh = unit_mesh(2, 16, BoundaryCondition::Periodic).unwrap();
        let exact = FnSolution {
            u: |x: [f64; 3]| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin(),
            grad: |_: [f64; 3]| [0.0; 3],
        };
        let e = error_norms(&exact, &Zero(&mesh), &QuadratureRule::gauss(5, 2));
        assert!((e.l2 - 0.5).abs() < 1e-10);
        assert_eq!(e.h1, 0.0);
    }

    #[test]
    fn slopes() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|v: &f64| 3.0 * v * v).collect();
        assert!((fitted_slope(&h, &e) - 2.0).abs() < 1e-12);
        assert!((observed_order(4.0, 1.0, 0.2, 0.1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triples_ordered() {
        let t = rank_triples(3);
        assert_eq!(t, vec![[2, 2, 2], [3, 2, 2], [3, 3, 2], [3, 3, 3]]);
    }
}
