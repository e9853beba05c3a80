use nalgebra::DMatrix;
use rayon::prelude::*;

use super::LinearOperator;
use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted, unique column ids per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

const PAR_ROWS: usize = 4096;

impl CsrMatrix {
    /// Builds from triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in triplets {
            if i >= nrows {
                return Err(Error::OutOfRange { index: i, len: nrows });
            }
            if j >= ncols {
                return Err(Error::OutOfRange { index: j, len: ncols });
            }
            rows[i].push((j, v));
        }
        Ok(Self::from_rows(ncols, rows))
    }

    /// Builds from per-row entry lists; entries are sorted and duplicates summed.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let start = col_idx.len();
            for (j, v) in r {
                if col_idx.len() > start && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx, values, symmetric: false }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).filter(|&j| m[(i, j)] != 0.0).map(|j| (j, m[(i, j)])).collect())
            .collect();
        Self::from_rows(m.ncols(), rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn is_symmetric_flagged(&self) -> bool {
        self.symmetric
    }

    /// Checks value-level symmetry to `rel_tol` of the largest entry.
    pub fn check_symmetric(&self, rel_tol: f64) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (0..self.nrows).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= rel_tol * scale))
    }

    /// Sets the symmetric flag after verifying symmetry to 1e-14 relative.
    pub fn into_symmetric(mut self) -> Result<Self> {
        if !self.check_symmetric(1e-14) {
            return Err(Error::Internal("matrix is not symmetric".into()));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                rows[j].push((i, v));
            }
        }
        let mut t = Self::from_rows(self.nrows, rows);
        t.symmetric = self.symmetric;
        t
    }

    /// Copy with row `i` replaced by the given entries.
    pub fn with_row(&self, i: usize, entries: &[(usize, f64)]) -> Self {
        let rows = (0..self.nrows).map(|r| if r == i { entries.to_vec() } else { self.row(r).collect() }).collect();
        Self::from_rows(self.ncols, rows)
    }

    /// Block diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &CsrMatrix, b: &CsrMatrix) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = (0..a.nrows).map(|i| a.row(i).collect()).collect();
        rows.extend((0..b.nrows).map(|i| b.row(i).map(|(j, v)| (j + a.ncols, v)).collect()));
        let mut m = Self::from_rows(a.ncols + b.ncols, rows);
        m.symmetric = a.symmetric && b.symmetric;
        m
    }

    /// Rows and columns in `rows`/`cols` ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let out = rows
            .map(|i| self.row(i).filter(|(j, _)| cols.contains(j)).map(|(j, v)| (j - cols.start, v)).collect())
            .collect();
        Self::from_rows(cols.len(), out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            s += self.values[k] * x[self.col_idx[k]];
        }
        s
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    /// Each row is summed sequentially in storage order, so results do not
    /// depend on the thread count.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.nrows >= PAR_ROWS {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = self.row_dot(i, x));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(i, x);
            }
        }
    }
}
