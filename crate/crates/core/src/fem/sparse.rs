use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix on the pattern given by per-row column lists. Columns are
    /// sorted and deduplicated.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<usize>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            debug_assert!(r.last().is_none_or(|&c| c < ncols));
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn zeroed(&self) -> Self {
        CsrMatrix {
            values: vec![0.0; self.nnz()],
            ..self.clone()
        }
    }

    /// Storage index of `(i, j)`, if it is in the pattern.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.index_of(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = 0.0;
            for k in lo..hi {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    /// Sum of all stored entries, compensated.
    pub fn sum(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A_ij − A_ji|` over the pattern.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `self += alpha · other` on an identical pattern.
    pub fn add_scaled(&mut self, alpha: f64, other: &CsrMatrix) {
        assert_eq!(self.row_ptr, other.row_ptr, "pattern mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)` as a standalone matrix.
    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(nr + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in r0..r0 + nr {
            for (j, v) in self.row(i) {
                if j >= c0 && j < c0 + nc {
                    col_idx.push(j - c0);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows: nr,
            ncols: nc,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Outcome of a converged linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final true relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB. `x` holds the initial guess and receives
/// the solution; convergence is declared on the true relative residual.
pub fn bicgstab(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = a.nrows;
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = tol * bnorm;

    let mut r = vec![0.0; n];
    let mut r0 = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];

    let true_residual = |x: &[f64], r: &mut [f64]| {
        a.matvec_into(x, r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        norm(r)
    };

    let mut iters = 0;
    let mut rnorm = true_residual(x, &mut r);
    let mut stalled_restarts = 0;
    // Outer loop restarts from the true residual after breakdown or a
    // recurrence residual that drifted from the true one.
    while rnorm > target {
        if iters >= max_iter || stalled_restarts > 5 {
            return Err(Error::LinearSolver {
                iterations: iters,
                residual: rnorm / bnorm,
            });
        }
        r0.copy_from_slice(&r);
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        p.iter_mut().for_each(|e| *e = 0.0);
        v.iter_mut().for_each(|e| *e = 0.0);
        let start = iters;
        loop {
            if iters >= max_iter {
                break;
            }
            iters += 1;
            let rho_new = dot(&r0, &r);
            if rho_new == 0.0 || !rho_new.is_finite() {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
                y[i] = inv_diag[i] * p[i];
            }
            a.matvec_into(&y, &mut v);
            let r0v = dot(&r0, &v);
            if r0v == 0.0 || !r0v.is_finite() {
                break;
            }
            alpha = rho / r0v;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) <= 0.5 * target {
                for i in 0..n {
                    x[i] += alpha * y[i];
                }
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * s[i];
            }
            a.matvec_into(&z, &mut t);
            let tt = dot(&t, &t);
            if tt == 0.0 {
                break;
            }
            omega = dot(&t, &s) / tt;
            for i in 0..n {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            if norm(&r) <= 0.5 * target || omega == 0.0 {
                break;
            }
        }
        let previous = rnorm;
        rnorm = true_residual(x, &mut r);
        if !rnorm.is_finite() {
            return Err(Error::LinearSolver {
                iterations: iters,
                residual: f64::NAN,
            });
        }
        if iters == start || rnorm >= previous {
            stalled_restarts += 1;
        }
    }
    Ok(SolveStats {
        iterations: iters,
        residual: rnorm / bnorm,
    })
}

/// Neumaier summation.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() {
            (s - t) + v
        } else {
            (v - t) + s
        };
        s = t;
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, lo: f64, d: f64, hi: f64) -> CsrMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![i];
                if i > 0 {
                    r.push(i - 1);
                }
                if i + 1 < n {
                    r.push(i + 1);
                }
                r
            })
            .collect();
        let mut m = CsrMatrix::from_rows(n, rows);
        for i in 0..n {
            let k = m.index_of(i, i).unwrap();
            m.values[k] = d;
            if i > 0 {
                let k = m.index_of(i, i - 1).unwrap();
                m.values[k] = lo;
            }
            if i + 1 < n {
                let k = m.index_of(i, i + 1).unwrap();
                m.values[k] = hi;
            }
        }
        m
    }

    #[test]
    fn pattern_is_sorted_and_unique() {
        let m = CsrMatrix::from_rows(4, vec![vec![3, 1, 1, 0], vec![], vec![2]]);
        assert_eq!(m.row_ptr, vec![0, 3, 3, 4]);
        assert_eq!(m.col_idx, vec![0, 1, 3, 2]);
        assert_eq!(m.index_of(0, 2), None);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn nonsymmetric_solve() {
        let n = 200;
        let a = tridiag(n, -1.3, 4.0, -0.7);
        let want: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin() + 2.0).collect();
        let b = a.matvec(&want);
        let mut x = vec![0.0; n];
        let stats = bicgstab(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(stats.residual <= 1e-12);
        for (xi, wi) in x.iter().zip(&want) {
            assert!((xi - wi).abs() < 1e-9);
        }
        // Exact initial guess: no iterations.
        let stats = bicgstab(&a, &b, &mut x, 1e-10, 1000).unwrap();
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn zero_rhs_and_failure() {
        let a = tridiag(10, -1.0, 2.0, -1.0);
        let mut x = vec![1.0; 10];
        assert_eq!(
            bicgstab(&a, &[0.0; 10], &mut x, 1e-10, 10)
                .unwrap()
                .iterations,
            0
        );
        assert!(x.iter().all(|&v| v == 0.0));
        let a = tridiag(400, -1.0, 2.0, -1.0);
        let mut x = vec![0.0; 400];
        let b = vec![1.0; 400];
        assert!(matches!(
            bicgstab(&a, &b, &mut x, 1e-14, 3),
            Err(Error::LinearSolver { .. })
        ));
    }

    #[test]
    fn blocks_and_norms() {
        let a = tridiag(4, -1.0, 2.0, -1.0);
        assert_eq!(a.norm_inf(), 4.0);
        assert_eq!(a.asymmetry(), 0.0);
        assert_eq!(a.row_sums(), vec![1.0, 0.0, 0.0, 1.0]);
        let b = a.block(1, 2, 1, 2);
        assert_eq!((b.get(0, 0), b.get(0, 1), b.get(1, 0)), (2.0, -1.0, -1.0));
        assert_eq!(b.nnz(), 4);
    }
}
