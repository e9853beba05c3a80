//! Sparse storage, Krylov solvers and dense reference computations.

mod cg;
mod csr;
pub mod dense;
mod gmres;
pub mod market;

use std::time::Duration;

use crate::error::{Error, Result};

pub use cg::{cg, cg_checked, cg_monitored, check_consistency};
pub use csr::CsrMatrix;
pub use gmres::gmres_restarted;

/// Anything that can multiply a vector.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for nalgebra::DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Target for `||b - A x|| / ||b||`.
    pub tolerance: f64,
    /// Iteration cap; `None` means ten times the system size.
    pub max_iter: Option<usize>,
    /// Krylov dimension between GMRES restarts.
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: 1e-10, max_iter: None, restart: 20 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidSpec(format!("tolerance {} not in (0, 1)", self.tolerance)));
        }
        if self.restart == 0 {
            return Err(Error::InvalidSpec("restart must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n.max(1))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// True relative residual at exit.
    pub residual: f64,
    pub converged: bool,
    pub wall_time: Duration,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||b - A x|| / ||b||`, or the absolute residual when `b = 0`.
pub fn relative_residual<A: LinearOperator + ?Sized>(a: &A, x: &[f64], b: &[f64]) -> f64 {
    let mut r = vec![0.0; b.len()];
    a.apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let nb = norm(b);
    norm(&r) / if nb > 0.0 { nb } else { 1.0 }
}
