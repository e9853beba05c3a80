//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use p1nc_core::analysis::{unit_mesh, Example, ManufacturedProblem};
use p1nc_core::schemes::{option_system, AssembledSystem};
use p1nc_core::{BoundaryCondition, Mesh, SchemeConfig, SchemeOption};

/// Periodic unit square with `n x n` cells.
pub fn square(n: usize) -> Arc<Mesh> {
    unit_mesh(2, n, BoundaryCondition::Periodic).expect("valid mesh")
}

/// The system an option solves for Example 2 on an `n x n` mesh.
pub fn example_system(option: SchemeOption, n: usize) -> AssembledSystem {
    let problem = ManufacturedProblem::new(Example::Ex2);
    let f = |x: [f64; 3]| problem.f(x);
    option_system(option, &square(n), &f, &SchemeConfig::default()).expect("assembly")
}
