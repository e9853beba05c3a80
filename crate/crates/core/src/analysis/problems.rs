//! Manufactured periodic solutions with zero mean.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fem_core::gauss_legendre;

/// An exact solution with its gradient.
pub trait ExactSolution: Sync {
    fn u(&self, x: [f64; 3]) -> f64;
    fn grad(&self, x: [f64; 3]) -> [f64; 3];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Example {
    /// Product of truncated square-wave Fourier series, 2D.
    Ex1,
    /// Product of shifted smooth bumps, 2D.
    Ex2,
    /// `sin(2 pi x) sin(2 pi y) sin(2 pi z)`, 3D.
    Ex3,
}

impl Example {
    pub const ALL: [Example; 3] = [Example::Ex1, Example::Ex2, Example::Ex3];

    pub fn name(self) -> &'static str {
        match self {
            Example::Ex1 => "ex1",
            Example::Ex2 => "ex2",
            Example::Ex3 => "ex3",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Example::Ex3 => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown example '{s}' (expected ex1, ex2 or ex3)")))
    }
}

/// `-Laplace u = f` on the unit box with periodic `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedProblem {
    example: Example,
}

impl ManufacturedProblem {
    pub fn new(example: Example) -> Self {
        if example == Example::Ex2 {
            bump_constant();
        }
        ManufacturedProblem { example }
    }

    pub fn example(&self) -> Example {
        self.example
    }

    pub fn name(&self) -> &'static str {
        self.example.name()
    }

    pub fn dim(&self) -> usize {
        self.example.dim()
    }

    /// One-dimensional factor and its first two derivatives.
    fn factor(&self, t: f64) -> (f64, f64, f64) {
        match self.example {
            Example::Ex1 => square_wave(t),
            Example::Ex2 => {
                let (s, ds, dds) = bump(t);
                (s + bump_constant(), ds, dds)
            }
            Example::Ex3 => {
                let w = 2.0 * PI;
                ((w * t).sin(), w * (w * t).cos(), -w * w * (w * t).sin())
            }
        }
    }

    pub fn f(&self, x: [f64; 3]) -> f64 {
        let d = self.dim();
        let parts: Vec<(f64, f64, f64)> = (0..d).map(|a| self.factor(x[a])).collect();
        let mut lap = 0.0;
        for a in 0..d {
            lap += (0..d).map(|b| if a == b { parts[b].2 } else { parts[b].0 }).product::<f64>();
        }
        -lap
    }
}

impl ExactSolution for ManufacturedProblem {
    fn u(&self, x: [f64; 3]) -> f64 {
        (0..self.dim()).map(|a| self.factor(x[a]).0).product()
    }

    fn grad(&self, x: [f64; 3]) -> [f64; 3] {
        let d = self.dim();
        let parts: Vec<(f64, f64, f64)> = (0..d).map(|a| self.factor(x[a])).collect();
        let mut g = [0.0; 3];
        for (a, ga) in g.iter_mut().enumerate().take(d) {
            *ga = (0..d).map(|b| if a == b { parts[b].1 } else { parts[b].0 }).product();
        }
        g
    }
}

/// Exact solution given by closures.
pub struct FnSolution<U, G> {
    pub u: U,
    pub grad: G,
}

impl<U, G> ExactSolution for FnSolution<U, G>
where
    U: Fn([f64; 3]) -> f64 + Sync,
    G: Fn([f64; 3]) -> [f64; 3] + Sync,
{
    fn u(&self, x: [f64; 3]) -> f64 {
        (self.u)(x)
    }
    fn grad(&self, x: [f64; 3]) -> [f64; 3] {
        (self.grad)(x)
    }
}

fn square_wave(t: f64) -> (f64, f64, f64) {
    let mut s = (0.0, 0.0, 0.0);
    for k in 1..=3 {
        let m = (2 * k - 1) as f64;
        let c = 4.0 / (m * PI);
        let w = 2.0 * m * PI;
        s.0 += c * (w * t).sin();
        s.1 += c * w * (w * t).cos();
        s.2 -= c * w * w * (w * t).sin();
    }
    s
}

/// `exp(-1/q) t^2 (1 - t)` with `q = 4 t (1 - t)`, and derivatives.
pub(crate) fn bump(t: f64) -> (f64, f64, f64) {
    let q = 4.0 * t * (1.0 - t);
    if q <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let dq = 4.0 - 8.0 * t;
    let ddq = -8.0;
    let g = (-1.0 / q).exp();
    let dg = g * dq / (q * q);
    let ddg = g * (dq * dq / q.powi(4) + ddq / (q * q) - 2.0 * dq * dq / q.powi(3));
    let p = t * t * (1.0 - t);
    let dp = 2.0 * t - 3.0 * t * t;
    let ddp = 2.0 - 6.0 * t;
    (g * p, dg * p + g * dp, ddg * p + 2.0 * dg * dp + g * ddp)
}

fn adaptive_gauss(
    f: &dyn Fn(f64) -> f64,
    (a, b): (f64, f64),
    whole: f64,
    tol: f64,
    depth: usize,
    nodes: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let rule = |lo: f64, hi: f64| -> f64 {
        nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(lo + (hi - lo) * x)).sum::<f64>() * (hi - lo)
    };
    let m = 0.5 * (a + b);
    let left = rule(a, m);
    let right = rule(m, b);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive_gauss(f, (a, m), left, 0.5 * tol, depth - 1, nodes)
        + adaptive_gauss(f, (m, b), right, 0.5 * tol, depth - 1, nodes)
}

/// `-int_0^1 exp(-1/q) t^2 (1 - t) dt`, so that the shifted bump has zero mean.
pub fn bump_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let nodes = gauss_legendre(10);
        let f = |t: f64| bump(t).0;
        let whole: f64 = nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(*x)).sum();
        -adaptive_gauss(&f, (0.0, 1.0), whole, 1e-16, 20, &nodes)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn composite(f: impl Fn(f64) -> f64, pieces: usize) -> f64 {
        let (x, w) = gauss_legendre(8);
        let h = 1.0 / pieces as f64;
        (0..pieces).map(|i| x.iter().zip(&w).map(|(x, w)| w * f((i as f64 + x) * h)).sum::<f64>() * h).sum()
    }

    #[test]
    fn bump_shift_has_zero_mean() {
        let c = bump_constant();
        assert!(c < 0.0);
        let s = composite(|t| bump(t).0 + c, 4000);
        assert!(s.abs() < 1e-12, "{s}");
    }

    fn finite_difference(ex: Example) {
        let p = ManufacturedProblem::new(ex);
        let d = ex.dim();
        let x = [0.31, 0.57, 0.73];
        let h = 1e-5;
        let g = p.grad(x);
        let mut lap = 0.0;
        for a in 0..d {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (p.u(xp) - p.u(xm)) / (2.0 * h);
            assert!((fd - g[a]).abs() < 1e-5 * (1.0 + g[a].abs()), "{ex} grad {a}");
            xp[a] += 9.0 * h;
            xm[a] -= 9.0 * h;
            lap += (p.u(xp) - 2.0 * p.u(x) + p.u(xm)) / (100.0 * h * h);
        }
        assert!((-lap - p.f(x)).abs() < 1e-4 * (1.0 + p.f(x).abs()), "{ex} laplacian");
    }

    #[test]
    fn derivatives_match_differences() {
        for ex in Example::ALL {
            finite_difference(ex);
        }
    }

    #[test]
    fn zero_means() {
        for ex in [Example::Ex1, Example::Ex2] {
            let p = ManufacturedProblem::new(ex);
            let su = composite(|t| p.factor(t).0, 400);
            let sf = composite(|t| p.factor(t).2, 400);
            assert!(su.abs() < 1e-12 && sf.abs() < 1e-10, "{ex}: {su} {sf}");
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("EX2".parse::<Example>().unwrap(), Example::Ex2);
        assert!("ex4".parse::<Example>().is_err());
    }
}
