use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{assemble, load_shift, AssembledSystem, DiscreteSolution, ScalarField, SchemeConfig};
use crate::error::{Error, Result};
use crate::fem_core::QuadratureRule;
use crate::linalg::{cg_checked, cg_monitored, check_consistency, gmres_restarted, SolveReport};
use crate::mesh::Mesh;
use crate::space::{build_catalog, kernel_vectors, unity_representation, BasisCatalog, CatalogKind};

/// The four ways of fixing the constant in the periodic problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeOption {
    /// Flat basis, last node row replaced by the zero-mean condition; GMRES.
    One,
    /// Flat basis, singular system by CG, then shifted to zero mean.
    Two,
    /// Full basis with alternating functions; CG from a zero-mean guess.
    Three,
    /// Node-based functions only; CG from a zero-mean guess.
    Four,
}

impl SchemeOption {
    pub const ALL: [SchemeOption; 4] = [SchemeOption::One, SchemeOption::Two, SchemeOption::Three, SchemeOption::Four];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1..=4 => Ok(Self::ALL[n as usize - 1]),
            _ => Err(Error::Parse(format!("option must be 1-4, got {n}"))),
        }
    }
}

impl fmt::Display for SchemeOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for SchemeOption {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n: u8 = s.trim().parse().map_err(|_| Error::Parse(format!("bad option '{s}'")))?;
        Self::from_number(n)
    }
}

fn require_even_2d(mesh: &Mesh, opt: SchemeOption) -> Result<()> {
    let n = mesh.counts();
    if mesh.dim() != 2 {
        return Err(Error::Unsupported(format!("option {opt} is available in 2D only; 3D supports option 4")));
    }
    if !mesh.is_periodic() || n[0] % 2 != 0 || n[1] % 2 != 0 {
        return Err(Error::Unsupported(format!(
            "option {opt} requires a periodic mesh with even cell counts in both directions, got {}x{}",
            n[0], n[1]
        )));
    }
    Ok(())
}

fn system<F: ScalarField>(mesh: &Arc<Mesh>, f: &F, kind: CatalogKind, cfg: &SchemeConfig) -> Result<AssembledSystem> {
    cfg.solver.validate()?;
    if mesh.uniform_h().is_none() {
        return Err(Error::Unsupported("solution options need a uniform mesh".into()));
    }
    let rule = QuadratureRule::gauss(cfg.quadrature_order, mesh.dim());
    let shift = load_shift(mesh, f, &rule, cfg);
    let catalog = Arc::new(build_catalog(mesh.clone(), kind)?);
    assemble(mesh, catalog, &|x: [f64; 3]| f(x) - shift, &rule)
}

fn padded(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out
}

fn stiffness_kernel(catalog: &BasisCatalog) -> Result<Vec<Vec<f64>>> {
    let k = kernel_vectors(catalog.mesh())?;
    Ok(k.stiffness.iter().map(|v| padded(v, catalog.len())).collect())
}

/// Option 1: GMRES on the flat system whose last node row is replaced by
/// the zero-mean condition.
pub fn solve_option1<F: ScalarField>(
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    let sys = option_system(SchemeOption::One, mesh, f, cfg)?;
    let (x, report) = gmres_restarted(&sys.matrix, &sys.rhs, &vec![0.0; sys.rhs.len()], &cfg.solver);
    Ok((DiscreteSolution::new(sys.catalog, x)?, report))
}

/// The linear system an option hands to its solver.
pub fn option_system<F: ScalarField>(
    option: SchemeOption,
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<AssembledSystem> {
    let kind = match option {
        SchemeOption::One | SchemeOption::Two => CatalogKind::EFlat,
        SchemeOption::Three => CatalogKind::E,
        SchemeOption::Four => {
            if !mesh.is_periodic() {
                return Err(Error::Unsupported("option 4 requires a periodic mesh".into()));
            }
            CatalogKind::B
        }
    };
    if option != SchemeOption::Four {
        require_even_2d(mesh, option)?;
    }
    let mut sys = system(mesh, f, kind, cfg)?;
    if option == SchemeOption::One {
        let last = sys.catalog.num_node_members() - 1;
        let ones: Vec<(usize, f64)> = (0..=last).map(|j| (j, 1.0)).collect();
        sys.matrix = sys.matrix.with_row(last, &ones);
        sys.rhs[last] = 0.0;
        sys.modified_row = Some(last);
    }
    Ok(sys)
}

/// Option 2: CG on the singular flat system, then the multiple of the unity
/// representation that restores zero mean is subtracted.
pub fn solve_option2<F: ScalarField>(
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    require_even_2d(mesh, SchemeOption::Two)?;
    let sys = system(mesh, f, CatalogKind::EFlat, cfg)?;
    let nb = sys.catalog.num_node_members();
    let node_catalog = build_catalog(mesh.clone(), CatalogKind::BFlat)?;
    let w = unity_representation(&node_catalog)?;
    let kernel = vec![padded(&w, sys.catalog.len())];
    let (mut x, report) = cg_checked(&sys.matrix, &sys.rhs, &vec![0.0; sys.rhs.len()], &cfg.solver, &kernel)?;
    let t = x[..nb].iter().sum::<f64>() / w.iter().sum::<f64>();
    for (xi, wi) in x[..nb].iter_mut().zip(&w) {
        *xi -= t * wi;
    }
    Ok((DiscreteSolution::new(sys.catalog, x)?, report))
}

/// Option 3: CG on the full system from the zero initial guess.
pub fn solve_option3<F: ScalarField>(
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    solve_option3_monitored(mesh, f, cfg, |_, _| {})
}

/// As [`solve_option3`], calling `monitor(k, x_k)` on every CG iterate.
pub fn solve_option3_monitored<F, M>(
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
    monitor: M,
) -> Result<(DiscreteSolution, SolveReport)>
where
    F: ScalarField,
    M: FnMut(usize, &[f64]),
{
    require_even_2d(mesh, SchemeOption::Three)?;
    let sys = system(mesh, f, CatalogKind::E, cfg)?;
    let kernel = stiffness_kernel(&sys.catalog)?;
    check_consistency(&sys.rhs, &kernel)?;
    let (x, report) = cg_monitored(&sys.matrix, &sys.rhs, &vec![0.0; sys.rhs.len()], &cfg.solver, monitor);
    Ok((DiscreteSolution::new(sys.catalog, x)?, report))
}

/// Option 4: CG on the node-based system from the zero initial guess; the
/// only option available in 3D.
pub fn solve_option4<F: ScalarField>(
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    if !mesh.is_periodic() {
        return Err(Error::Unsupported("option 4 requires a periodic mesh".into()));
    }
    let sys = system(mesh, f, CatalogKind::B, cfg)?;
    let kernel = stiffness_kernel(&sys.catalog)?;
    let (x, report) = cg_checked(&sys.matrix, &sys.rhs, &vec![0.0; sys.rhs.len()], &cfg.solver, &kernel)?;
    Ok((DiscreteSolution::new(sys.catalog, x)?, report))
}

pub fn solve_option<F: ScalarField>(
    option: SchemeOption,
    mesh: &Arc<Mesh>,
    f: &F,
    cfg: &SchemeConfig,
) -> Result<(DiscreteSolution, SolveReport)> {
    match option {
        SchemeOption::One => solve_option1(mesh, f, cfg),
        SchemeOption::Two => solve_option2(mesh, f, cfg),
        SchemeOption::Three => solve_option3(mesh, f, cfg),
        SchemeOption::Four => solve_option4(mesh, f, cfg),
    }
}
