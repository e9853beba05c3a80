use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use p1nc_core::linalg::dense::{drazin_axiom_defect, drazin_inverse, matrix_index, stable_rank};
use p1nc_core::linalg::{cg, LinearOperator};
use p1nc_core::schemes::{gram_block, option_system, DiscreteSolution, Form};
use p1nc_core::space::{constraint_rank_oracle, dim_formulas, kernel_vectors};
use p1nc_core::{
    build_catalog, BoundaryCondition, CatalogKind, GridSpec, Mesh, SchemeConfig, SchemeOption, SolverConfig,
};

fn periodic(counts: &[usize]) -> Arc<Mesh> {
    Arc::new(Mesh::new(GridSpec::square_cells(counts).unwrap(), BoundaryCondition::Periodic))
}

fn bc() -> impl Strategy<Value = BoundaryCondition> {
    prop::sample::select(BoundaryCondition::ALL.to_vec())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn matrix(n: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_iterator(n, n, entries.iter().copied().cycle().take(n * n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn formulas_match_oracle_2d(nx in 1usize..7, ny in 1usize..7, bc in bc()) {
        let spec = GridSpec::square_cells(&[nx, ny]).unwrap();
        prop_assert_eq!(dim_formulas(&spec, bc), constraint_rank_oracle(&spec, bc).unwrap());
    }

    #[test]
    fn formulas_match_oracle_3d(nx in 1usize..4, ny in 1usize..4, nz in 1usize..4, bc in bc()) {
        let spec = GridSpec::square_cells(&[nx, ny, nz]).unwrap();
        prop_assert_eq!(dim_formulas(&spec, bc), constraint_rank_oracle(&spec, bc).unwrap());
    }

    #[test]
    fn kernel_vectors_annihilated(counts in prop::collection::vec(1usize..7, 2..=3)) {
        let mesh = periodic(&counts);
        let cat = build_catalog(mesh.clone(), CatalogKind::B).unwrap();
        let s = gram_block(&cat, 0..cat.len(), 0..cat.len(), Form::Stiffness);
        let scale = s.max_abs();
        for v in kernel_vectors(&mesh).unwrap().stiffness {
            let mut y = vec![0.0; v.len()];
            s.apply(&v, &mut y);
            prop_assert!(norm(&y) <= 1e-12 * scale * norm(&v));
        }
    }

    #[test]
    fn node_and_alternating_blocks_are_orthogonal(hx in 1usize..6, hy in 1usize..6) {
        let cat = build_catalog(periodic(&[2 * hx, 2 * hy]), CatalogKind::E).unwrap();
        let nb = cat.num_node_members();
        let cross = gram_block(&cat, 0..nb, nb..cat.len(), Form::Stiffness);
        prop_assert!(cross.max_abs() <= 1e-13);
    }

    #[test]
    fn alternating_functions_have_zero_integral(hx in 1usize..6, hy in 1usize..6) {
        let cat = Arc::new(build_catalog(periodic(&[2 * hx, 2 * hy]), CatalogKind::A).unwrap());
        for i in 0..cat.len() {
            let mut c = vec![0.0; cat.len()];
            c[i] = 1.0;
            let u = DiscreteSolution::new(cat.clone(), c).unwrap();
            prop_assert!(u.integral().abs() <= 1e-14);
        }
    }

    #[test]
    fn flat_node_block_is_nonsingular(hx in 1usize..5, hy in 1usize..5) {
        let cat = build_catalog(periodic(&[2 * hx, 2 * hy]), CatalogKind::BFlat).unwrap();
        let s = gram_block(&cat, 0..cat.len(), 0..cat.len(), Form::Stiffness).to_dense();
        // Only the constant remains in the kernel once a node is dropped.
        prop_assert_eq!(stable_rank(&s).unwrap(), cat.len() - 1);
        let sys = option_system(SchemeOption::One, &periodic(&[2 * hx, 2 * hy]), &|_: [f64; 3]| 0.0, &SchemeConfig::default()).unwrap();
        let m = sys.matrix.to_dense();
        prop_assert_eq!(stable_rank(&m).unwrap(), m.nrows());
    }

    #[test]
    fn cg_matches_dense_solve(n in 2usize..12, entries in prop::collection::vec(-1.0f64..1.0, 144), rhs in prop::collection::vec(-1.0f64..1.0, 12)) {
        let b = matrix(n, &entries);
        let a = &b * b.transpose() + DMatrix::identity(n, n);
        let rhs = &rhs[..n];
        let (x, report) = cg(&a, rhs, &vec![0.0; n], &SolverConfig { tolerance: 1e-13, ..SolverConfig::default() });
        prop_assert!(report.converged);
        let exact = a.clone().lu().solve(&nalgebra::DVector::from_column_slice(rhs)).unwrap();
        let err: Vec<f64> = x.iter().zip(exact.iter()).map(|(p, q)| p - q).collect();
        prop_assert!(norm(&err) <= 1e-9 * norm(exact.as_slice()).max(1e-300));
    }

    #[test]
    fn drazin_axioms_hold(
        core in 1usize..5,
        nil in 0usize..4,
        entries in prop::collection::vec(-1.0f64..1.0, 64),
        mix in prop::collection::vec(-0.3f64..0.3, 64),
    ) {
        let n = core + nil;
        let mut block = DMatrix::<f64>::zeros(n, n);
        let c = matrix(core, &entries) + DMatrix::identity(core, core) * 5.0;
        block.view_mut((0, 0), (core, core)).copy_from(&c);
        for i in core..n.saturating_sub(1) {
            block[(i, i + 1)] = 1.0;
        }
        let q = DMatrix::identity(n, n) + matrix(n, &mix);
        let a = &q * block * q.clone().try_inverse().unwrap();
        let d = drazin_inverse(&a).unwrap();
        prop_assert_eq!(matrix_index(&a).unwrap(), nil);
        prop_assert!(drazin_axiom_defect(&a, &d).unwrap() <= 1e-8);
    }
}
