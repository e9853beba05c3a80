use std::sync::Arc;

use nalgebra::DMatrix;

use super::{build_catalog, e, BasisCatalog, CatalogKind};
use crate::error::{Error, Result};
use crate::linalg::dense::stable_rank;
use crate::mesh::{BoundaryCondition, GridSpec, Mesh};

/// Largest face count the dense oracle accepts.
pub const ORACLE_FACE_CAP: usize = 6000;

/// Dimensions of a discrete space and of the node-based function set.
///
/// The node-based set is all nodes for periodic and Neumann conditions and
/// the interior nodes for Dirichlet conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionRecord {
    /// Dimension of the finite element space.
    pub space: usize,
    /// Dimension of the kernel of the node-based representation map.
    pub ker_representation: usize,
    /// Nullity of the node-based stiffness matrix.
    pub ker_stiffness: usize,
    /// Dimension of the span of the node-based functions.
    pub span_nodes: usize,
}

/// Closed-form dimension counts.
pub fn dim_formulas(spec: &GridSpec, bc: BoundaryCondition) -> DimensionRecord {
    let n = spec.counts();
    let cells: usize = n.iter().product();
    let nodes: usize = n.iter().map(|x| x + 1).product();
    let interior: usize = n.iter().map(|x| x - 1).product();
    if spec.dim() == 2 {
        let ee = e(n[0]) * e(n[1]);
        match bc {
            BoundaryCondition::Neumann => {
                DimensionRecord { space: nodes - 1, ker_representation: 1, ker_stiffness: 2, span_nodes: nodes - 1 }
            }
            BoundaryCondition::Dirichlet => {
                DimensionRecord { space: interior, ker_representation: 0, ker_stiffness: 0, span_nodes: interior }
            }
            BoundaryCondition::Periodic => DimensionRecord {
                space: cells + ee,
                ker_representation: ee,
                ker_stiffness: ee + 1,
                span_nodes: cells - ee,
            },
        }
    } else {
        let (ex, ey, ez) = (e(n[0]), e(n[1]), e(n[2]));
        let eee = ex * ey * ez;
        let t = n[0] * ey * ez + n[1] * ex * ez + n[2] * ex * ey;
        let s: usize = n.iter().sum();
        match bc {
            BoundaryCondition::Neumann => DimensionRecord {
                space: nodes - s - 1,
                ker_representation: s + 1,
                ker_stiffness: s + 2,
                span_nodes: nodes - s - 1,
            },
            BoundaryCondition::Dirichlet => {
                DimensionRecord { space: interior, ker_representation: 0, ker_stiffness: 0, span_nodes: interior }
            }
            BoundaryCondition::Periodic => DimensionRecord {
                space: cells + t - eee,
                ker_representation: t - 2 * eee,
                ker_stiffness: t - 2 * eee + 1,
                span_nodes: cells - t + 2 * eee,
            },
        }
    }
}

fn dense_stiffness(catalog: &BasisCatalog) -> DMatrix<f64> {
    let mesh = catalog.mesh();
    let d = mesh.dim();
    let vol = catalog.h().powi(d as i32);
    let nb = catalog.len();
    let mut s = DMatrix::<f64>::zeros(nb, nb);
    for c in 0..mesh.num_cells() {
        let local = catalog.on_cell(c);
        for (i, p) in &local {
            for (j, q) in &local {
                s[(*i, *j)] += vol * (0..d).map(|a| p.grad[a] * q.grad[a]).sum::<f64>();
            }
        }
    }
    s
}

/// Nullity of the node-based stiffness matrix, by eigenvalues.
pub fn stiffness_nullity(spec: &GridSpec, bc: BoundaryCondition) -> Result<usize> {
    let mesh = Arc::new(Mesh::new(spec.clone(), bc));
    if mesh.num_faces() > ORACLE_FACE_CAP {
        return Err(Error::TooLarge { size: mesh.num_faces(), cap: ORACLE_FACE_CAP });
    }
    let catalog = build_catalog(mesh, CatalogKind::B)?;
    if catalog.is_empty() {
        return Ok(0);
    }
    Ok(catalog.len() - stable_rank(&dense_stiffness(&catalog))?)
}

/// Dimension counts from numerical ranks: the space dimension is the face
/// count minus the rank of the dice constraints, the kernels come from the
/// representation matrix and the assembled stiffness matrix.
pub fn constraint_rank_oracle(spec: &GridSpec, bc: BoundaryCondition) -> Result<DimensionRecord> {
    let mesh = Arc::new(Mesh::new(spec.clone(), bc));
    if mesh.num_faces() > ORACLE_FACE_CAP {
        return Err(Error::TooLarge { size: mesh.num_faces(), cap: ORACLE_FACE_CAP });
    }
    let d = mesh.dim();

    let boundary = mesh.boundary_faces();
    let mut col = vec![usize::MAX; mesh.num_faces()];
    let mut ncols = 0;
    for (f, c) in col.iter_mut().enumerate() {
        if bc == BoundaryCondition::Dirichlet && boundary.binary_search(&f).is_ok() {
            continue;
        }
        *c = ncols;
        ncols += 1;
    }
    let mut dice = DMatrix::<f64>::zeros(mesh.num_cells() * (d - 1), ncols);
    for c in 0..mesh.num_cells() {
        let faces = mesh.cell_faces(c);
        for mu in 1..d {
            let row = c * (d - 1) + mu - 1;
            for (lf, w) in [(0, 1.0), (1, 1.0), (2 * mu, -1.0), (2 * mu + 1, -1.0)] {
                let j = col[faces[lf]];
                if j != usize::MAX {
                    dice[(row, j)] += w;
                }
            }
        }
    }
    let space = ncols - stable_rank(&dice)?;

    let catalog = build_catalog(mesh.clone(), CatalogKind::B)?;
    let nb = catalog.len();
    let span_nodes = if nb == 0 { 0 } else { stable_rank(&catalog.representation_matrix())? };

    let rank_s = if nb == 0 { 0 } else { stable_rank(&dense_stiffness(&catalog))? };

    Ok(DimensionRecord { space, ker_representation: nb - span_nodes, ker_stiffness: nb - rank_s, span_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: &[usize]) -> GridSpec {
        GridSpec::square_cells(n).unwrap()
    }

    #[test]
    fn examples() {
        let r = dim_formulas(&spec(&[4, 4]), BoundaryCondition::Periodic);
        assert_eq!((r.space, r.ker_stiffness), (17, 2));
        let r = dim_formulas(&spec(&[3, 4]), BoundaryCondition::Periodic);
        assert_eq!((r.space, r.ker_stiffness), (12, 1));
        assert_eq!(dim_formulas(&spec(&[2, 2, 2]), BoundaryCondition::Periodic).ker_stiffness, 5);
        assert_eq!(constraint_rank_oracle(&spec(&[2, 2]), BoundaryCondition::Periodic).unwrap().space, 5);
        assert_eq!(constraint_rank_oracle(&spec(&[4, 4, 2]), BoundaryCondition::Periodic).unwrap().ker_stiffness, 9);
        assert_eq!(constraint_rank_oracle(&spec(&[3, 3, 3]), BoundaryCondition::Periodic).unwrap().ker_stiffness, 1);
    }

    #[test]
    fn oracle_agrees_small_sweep() {
        for bc in BoundaryCondition::ALL {
            for nx in 1..=4 {
                for ny in 1..=4 {
                    let s = spec(&[nx, ny]);
                    assert_eq!(dim_formulas(&s, bc), constraint_rank_oracle(&s, bc).unwrap(), "{bc} {nx}x{ny}");
                }
            }
            for n in [[1, 1, 1], [2, 2, 2], [3, 2, 2], [2, 3, 4], [3, 3, 3]] {
                let s = spec(&n);
                assert_eq!(dim_formulas(&s, bc), constraint_rank_oracle(&s, bc).unwrap(), "{bc} {n:?}");
            }
        }
    }

    #[test]
    fn cap_enforced() {
        let s = spec(&[20, 20, 20]);
        assert!(matches!(constraint_rank_oracle(&s, BoundaryCondition::Periodic), Err(Error::TooLarge { .. })));
    }
}
