//! Dense symmetric positive-definite solves.
//!
//! Matrices are row-major `n × n` slices. Only the lower triangle is read.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Rows at or above this size use the blocked factorization.
const BLOCKED_THRESHOLD: usize = 256;
const BLOCK: usize = 64;

/// Unrolled dot product; the four accumulators let the compiler vectorize.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factor a copy of `a`.
    pub fn new(a: &[f64], n: usize) -> Result<Self> {
        Self::from_vec(a[..n * n].to_vec(), n)
    }

    /// Factor in place, taking ownership of the storage.
    pub fn from_vec(mut a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix storage must be n*n");
        if n >= BLOCKED_THRESHOLD {
            factor_blocked(&mut a, n)?;
        } else {
            factor_rows(&mut a, n, 0, n)?;
        }
        for i in 0..n {
            for v in &mut a[i * n + i + 1..(i + 1) * n] {
                *v = 0.0;
            }
        }
        Ok(Cholesky { n, l: a })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row-major storage of `L` (upper triangle zeroed).
    pub fn lower(&self) -> &[f64] {
        &self.l
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.l[i * self.n..i * self.n + i + 1]
    }

    /// Solve `L x = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b[..self.n].to_vec();
        for i in 0..self.n {
            let row = self.row(i);
            let s = x[i] - dot(&row[..i], &x[..i]);
            x[i] = s / row[i];
        }
        x
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = self.solve_lower(b);
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    pub fn logdet(&self) -> f64 {
        (0..self.n).map(|i| 2.0 * self.l[i * self.n + i].ln()).sum()
    }

    /// `L z`.
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), &z[..=i])).collect()
    }
}

/// Solve `A x = b` for SPD `A` and return `(x, log det A)`.
pub fn chol_solve_logdet(a: &[f64], n: usize, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if b.len() != n {
        return Err(Error::LengthMismatch {
            what: "matrix and right-hand side",
            left: n,
            right: b.len(),
        });
    }
    let chol = Cholesky::new(a, n)?;
    Ok((chol.solve(b), chol.logdet()))
}

/// Row-oriented factorization of rows `r0..r1`, assuming columns `< r0` of
/// those rows have already been eliminated against earlier rows.
fn factor_rows(a: &mut [f64], n: usize, r0: usize, r1: usize) -> Result<()> {
    for i in r0..r1 {
        for j in r0..=i {
            let s = a[i * n + j] - dot(&a[i * n + r0..i * n + j], &a[j * n + r0..j * n + j]);
            if i == j {
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                }
                a[i * n + i] = s.sqrt();
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    Ok(())
}

/// Right-looking blocked factorization; the trailing update is tiled so the
/// panel rows being combined stay in cache.
fn factor_blocked(a: &mut [f64], n: usize) -> Result<()> {
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + BLOCK).min(n);
        factor_rows(a, n, k0, k1)?;
        for i in k1..n {
            for j in k0..k1 {
                let s = a[i * n + j] - dot(&a[i * n + k0..i * n + j], &a[j * n + k0..j * n + j]);
                a[i * n + j] = s / a[j * n + j];
            }
        }
        let mut ib = k1;
        while ib < n {
            let ie = (ib + BLOCK).min(n);
            let mut jb = k1;
            while jb < ie {
                let je = (jb + BLOCK).min(n);
                for i in ib..ie {
                    for j in jb..je.min(i + 1) {
                        let s = dot(&a[i * n + k0..i * n + k1], &a[j * n + k0..j * n + k1]);
                        a[i * n + j] -= s;
                    }
                }
                jb = je;
            }
            ib = ie;
        }
        k0 = k1;
    }
    Ok(())
}
