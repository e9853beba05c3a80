//! Reference values published for the manufactured examples, the 3D rank
//! deficiency sweep and the iteration counts on the 256 x 256 mesh.

use super::problems::Example;
use crate::schemes::SchemeOption;

/// One published row: cells per axis, broken H1 error and order, L2 error
/// and order (orders absent on the coarsest row).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenRow {
    pub n: usize,
    pub h1: f64,
    pub h1_order: Option<f64>,
    pub l2: f64,
    pub l2_order: Option<f64>,
}

const fn row(n: usize, h1: f64, h1o: f64, l2: f64, l2o: f64) -> GoldenRow {
    GoldenRow { n, h1, h1_order: Some(h1o), l2, l2_order: Some(l2o) }
}

const fn first(n: usize, h1: f64, l2: f64) -> GoldenRow {
    GoldenRow { n, h1, h1_order: None, l2, l2_order: None }
}

/// Example 1; all four options report the same values.
pub const EX1: [GoldenRow; 6] = [
    first(8, 1.123e1, 4.230e-1),
    row(16, 5.466, 1.039, 8.607e-2, 2.297),
    row(32, 2.832, 0.949, 2.216e-2, 1.957),
    row(64, 1.429, 0.987, 5.585e-3, 1.989),
    row(128, 7.160e-1, 0.997, 1.399e-3, 1.997),
    row(256, 3.582e-1, 0.999, 3.499e-4, 1.999),
];

/// Example 2; all four options report the same values.
pub const EX2: [GoldenRow; 6] = [
    first(8, 1.225e-3, 5.649e-5),
    row(16, 6.024e-4, 1.024, 1.033e-5, 2.450),
    row(32, 3.045e-4, 0.984, 1.949e-6, 2.406),
    row(64, 1.527e-4, 0.996, 4.682e-7, 2.058),
    row(128, 7.642e-5, 0.999, 1.171e-7, 1.999),
    row(256, 3.822e-5, 1.000, 2.929e-8, 2.000),
];

/// Example 3, option 4.
pub const EX3: [GoldenRow; 5] = [
    first(8, 1.505, 3.848e-2),
    row(16, 7.550e-1, 0.995, 9.716e-3, 1.986),
    row(32, 3.777e-1, 0.999, 2.434e-3, 1.997),
    row(64, 1.889e-1, 1.000, 6.089e-4, 1.999),
    row(128, 9.443e-2, 1.000, 1.523e-4, 2.000),
];

pub fn convergence_table(example: Example) -> &'static [GoldenRow] {
    match example {
        Example::Ex1 => &EX1,
        Example::Ex2 => &EX2,
        Example::Ex3 => &EX3,
    }
}

/// Published row for `n` cells per axis, if any.
pub fn convergence_row(example: Example, n: usize) -> Option<GoldenRow> {
    convergence_table(example).iter().copied().find(|r| r.n == n)
}

/// Nullity of the 3D node-based stiffness matrix, `(Nx, Ny, Nz, nullity)`
/// with `Nx >= Ny >= Nz`.
pub const RANK_DEFICIENCY: [(usize, usize, usize, usize); 74] = [
    (2, 2, 2, 5),
    (3, 2, 2, 4),
    (3, 3, 2, 1),
    (4, 2, 2, 7),
    (4, 3, 2, 4),
    (4, 4, 2, 9),
    (5, 2, 2, 6),
    (5, 3, 2, 1),
    (5, 4, 2, 6),
    (5, 5, 2, 1),
    (6, 2, 2, 9),
    (6, 3, 2, 4),
    (6, 4, 2, 11),
    (6, 5, 2, 6),
    (6, 6, 2, 13),
    (7, 2, 2, 8),
    (7, 3, 2, 1),
    (7, 4, 2, 8),
    (7, 5, 2, 1),
    (7, 6, 2, 8),
    (7, 7, 2, 1),
    (8, 2, 2, 11),
    (8, 3, 2, 4),
    (8, 4, 2, 13),
    (8, 5, 2, 6),
    (8, 6, 2, 15),
    (8, 7, 2, 8),
    (8, 8, 2, 17),
    (3, 3, 3, 1),
    (4, 3, 3, 1),
    (4, 4, 3, 4),
    (5, 3, 3, 1),
    (5, 4, 3, 1),
    (5, 5, 3, 1),
    (6, 3, 3, 1),
    (6, 4, 3, 4),
    (6, 5, 3, 1),
    (6, 6, 3, 4),
    (7, 3, 3, 1),
    (7, 4, 3, 1),
    (7, 5, 3, 1),
    (7, 6, 3, 1),
    (7, 7, 3, 1),
    (8, 3, 3, 1),
    (8, 4, 3, 4),
    (8, 5, 3, 1),
    (8, 6, 3, 4),
    (8, 7, 3, 1),
    (8, 8, 3, 4),
    (4, 4, 4, 11),
    (5, 4, 4, 6),
    (5, 5, 4, 1),
    (6, 4, 4, 13),
    (6, 5, 4, 6),
    (6, 6, 4, 15),
    (7, 4, 4, 8),
    (7, 5, 4, 1),
    (7, 6, 4, 8),
    (7, 7, 4, 1),
    (8, 4, 4, 15),
    (8, 5, 4, 6),
    (8, 6, 4, 17),
    (8, 7, 4, 8),
    (8, 8, 4, 19),
    (5, 5, 5, 1),
    (6, 5, 5, 1),
    (6, 6, 5, 6),
    (7, 5, 5, 1),
    (7, 6, 5, 1),
    (7, 7, 5, 1),
    (8, 5, 5, 1),
    (8, 6, 5, 6),
    (8, 7, 5, 1),
    (8, 8, 5, 6),
];

/// Iteration counts for Example 2 on the 256 x 256 mesh.
pub const ITERATIONS_EX2_256: [(SchemeOption, usize); 4] =
    [(SchemeOption::One, 4944), (SchemeOption::Two, 817), (SchemeOption::Three, 437), (SchemeOption::Four, 318)];
